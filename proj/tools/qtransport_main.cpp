#include "qtransport/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qtransport::cli::run_cli(argc, argv, std::cout, std::cerr); }
