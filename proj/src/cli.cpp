#include "qtransport/cli.hpp"

#include "qtransport/report_io.hpp"
#include "qtransport/toymodel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace qtransport::cli {

namespace {

using Clock = std::chrono::steady_clock;

class Log {
 public:
  Log(std::ostream& out, bool quiet) : out_(out), quiet_(quiet), start_(Clock::now()) {}

  template <class... Args>
  void operator()(const Args&... args) const {
    if (quiet_) return;
    std::ostringstream line;
    line.precision(4);
    line << "[qtransport " << std::fixed << elapsed() << "s] ";
    line.unsetf(std::ios::fixed);
    line.precision(6);
    (line << ... << args);
    out_ << line.str() << '\n' << std::flush;
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  std::ostream& out_;
  bool quiet_;
  Clock::time_point start_;
};

// Output sink: standard output for "-", otherwise a file opened on demand.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open output file " + path);
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }
  const std::string& path() const { return path_; }
  void flush() {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("write failed on " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

double omega_of(const Scenario& s) { return s.network.omega_a; }

double tau_of(const BathSpec& bath) {
  return bath.occupation == 0.0 ? 0.0 : 1.0 / std::log1p(1.0 / bath.occupation);
}

std::string output_path(const std::string& subcommand, const RunConfig& config) {
  return config.out.empty() ? default_output(subcommand, config) : config.out;
}

void run_rates(const RunConfig& config, Sink& sink, const Log& log) {
  const Scenario s = build_scenario(config);
  require_valid(validate_network(s.network), s.name);
  const BathSpec b = bath(config, omega_of(s));
  const CouplingTable table = build_coupling_table(s.network, b);
  log("rates: ", s.network.size(), " sites, n = ", table.occupation);
  io::write_coupling_csv(sink.stream(), table);
}

void run_steady(const RunConfig& config, Sink& sink, const Log& log) {
  const Scenario s = build_scenario(config);
  const BathSpec b = bath(config, omega_of(s));
  log("steady: scenario ", s.name, ", n = ", b.occupation);
  const StationaryPoint sp = solve_stationary(s, b, config.steady_options());
  io::json j = io::to_json(sp.report);
  j["scenario"] = s.name;
  j["tau"] = tau_of(b);
  j["n"] = b.occupation;
  if (b.temperature) j["kelvin"] = *b.temperature;
  j["residual"] = {{"pumped", sp.pumped.residual}, {"baseline", sp.baseline.residual}};
  j["status"] = "ok";
  log("steady: chi = ", sp.report.chi, ", residual ", std::max(sp.pumped.residual, sp.baseline.residual));
  sink.stream() << j.dump(2) << '\n';
}

void run_dynamics(const RunConfig& config, Sink& sink, const Log& log) {
  const Scenario s = build_scenario(config);
  const BathSpec b = bath(config, omega_of(s));
  const auto grid = time_grid(config);
  log("dynamics: scenario ", s.name, ", n = ", b.occupation, ", t in [", grid.front(), ", ", grid.back(), "]");
  const DynamicsResult r = solve_dynamics(s, b, grid, config.evolve_options());
  const auto& t = r.pumped;
  log("dynamics: ", t.accepted_steps, " accepted / ", t.rejected_steps, " rejected steps",
      t.stiffness_switch ? ", implicit from t = " + std::to_string(*t.stiffness_switch) : std::string());
  log("dynamics: chi(t_end) = ", r.chi_flux.back());
  io::write_trajectory_csv(sink.stream(), r, config.pair_fluxes);
}

void report_failures(const std::vector<SweepPoint>& points, const Log& log, std::size_t& failed) {
  for (const auto& p : points) {
    if (!p.report) {
      ++failed;
      log("warning: point ", p.parameter, " failed: ", p.error);
    }
  }
}

void run_sweep_temperature(const RunConfig& config, Sink& sink, const Log& log) {
  const Scenario s = build_scenario(config);
  const auto taus = sweep_taus(config, omega_of(s));
  log("sweep-temperature: scenario ", s.name, ", ", taus.size(), " points, ", config.jobs, " jobs");
  io::write_sweep_header(sink.stream(), s.paths, false);
  std::size_t failed = 0;
  // Points are solved in batches of `jobs`; each batch is written in grid
  // order as soon as it completes.
  for (std::size_t begin = 0; begin < taus.size(); begin += config.jobs) {
    const std::size_t end = std::min(taus.size(), begin + config.jobs);
    const std::vector<double> batch(taus.begin() + static_cast<std::ptrdiff_t>(begin),
                                    taus.begin() + static_cast<std::ptrdiff_t>(end));
    const auto points = sweep_temperature(s, batch, config.steady_options(), config.jobs);
    for (const auto& p : points) io::write_sweep_row(sink.stream(), p, s.paths, false);
    sink.flush();
    report_failures(points, log, failed);
    log("sweep-temperature: ", end, "/", taus.size());
  }
  if (failed) log("sweep-temperature: ", failed, " point(s) failed; see the status column");
}

void run_sweep_angle(const RunConfig& config, Sink& sink, const Log& log) {
  if (!is_ring(config)) throw ConfigError("sweep-angle needs a ring scenario (RP, CH or NH)");
  const RingScenario ring = ring_scenario(config);
  (void)ring.slot(config.angle_slot);
  const Scenario s = build_scenario(config);
  const auto taus = sweep_taus(config, ring.omega_a);
  const auto thetas = linear_grid(config.theta_min, config.theta_max, config.theta_points);
  log("sweep-angle: slot ", config.angle_slot, ", ", thetas.size(), " x ", taus.size(), " points");
  io::write_sweep_header(sink.stream(), s.paths, true);
  std::size_t failed = 0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    RingScenario r = ring;
    const auto points = sweep_angle(r, config.angle_slot, thetas, {taus[k]}, config.steady_options(), config.jobs);
    for (const auto& p : points) io::write_sweep_row(sink.stream(), p, s.paths, true);
    sink.flush();
    report_failures(points, log, failed);
    log("sweep-angle: tau ", k + 1, "/", taus.size());
  }
  if (failed) log("sweep-angle: ", failed, " point(s) failed; see the status column");
}

void run_toy(const RunConfig& config, Sink& sink, const Log& log) {
  const auto grid = log_grid(config.toy_n_h_min, config.toy_n_h_max, config.toy_n_h_points);
  std::vector<io::ToyRow> rows;
  for (double n_b : config.toy_n_b) {
    const std::size_t first = rows.size();
    for (double n_h : grid) {
      const toy::ToyParams p{n_h, n_b, config.toy_gamma_nl};
      rows.push_back({n_b, n_h, toy::coherence_closed_form(p), toy::coherence_numeric(p), false});
    }
    // maximum on the hot branch n_h > n_B; below n_B the roles of the two
    // reservoirs are exchanged
    std::optional<std::size_t> best;
    for (std::size_t k = first; k < rows.size(); ++k) {
      if (rows[k].n_h <= n_b) continue;
      if (!best || std::abs(rows[k].numeric) > std::abs(rows[*best].numeric)) best = k;
    }
    if (!best) {
      log("toy-model: n_B = ", n_b, ", no grid point with n_h > n_B");
      continue;
    }
    rows[*best].is_max = true;
    log("toy-model: n_B = ", n_b, ", max |c| = ", std::abs(rows[*best].numeric), " at n_h = ", rows[*best].n_h);
  }
  io::write_toy_csv(sink.stream(), rows);
}

void emit_error(std::ostream& out, const std::string& kind, int code, const std::string& message,
                const std::optional<double>& residual = std::nullopt) {
  io::json j{{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
  if (residual && std::isfinite(*residual)) j["residual"] = *residual;
  out << j.dump() << '\n' << std::flush;
}

const std::vector<std::pair<std::string, std::string>>& subcommands() {
  static const std::vector<std::pair<std::string, std::string>> names{
      {"rates", "pair coupling table (CSV)"},
      {"steady", "stationary state and flux report (JSON)"},
      {"dynamics", "chi(t) and energy meters along a trajectory (CSV)"},
      {"sweep-temperature", "stationary efficiency over a temperature grid (CSV)"},
      {"sweep-angle", "ring slot angle x temperature grid (CSV)"},
      {"toy-model", "two-atom coherence, closed form against numeric (CSV)"},
  };
  return names;
}

std::string extension(const std::string& subcommand) { return subcommand == "steady" ? ".json" : ".csv"; }

}  // namespace

std::string default_output(const std::string& subcommand, const RunConfig& config) {
  const char* dir = std::getenv(output_dir_env);
  if (!dir || !*dir) return "-";
  std::string stem = subcommand;
  if (subcommand != "toy-model") {
    stem += "_" + (is_ring(config) ? config.kind : std::filesystem::path(config.coordinates).stem().string());
  }
  return (std::filesystem::path(dir) / (stem + extension(subcommand))).string();
}

void run(const std::string& subcommand, const RunConfig& config, std::ostream& out, std::ostream& log_stream) {
  validate(config);
  const Log log(log_stream, false);
  Sink sink(output_path(subcommand, config), out);
  if (subcommand == "rates") run_rates(config, sink, log);
  else if (subcommand == "steady") run_steady(config, sink, log);
  else if (subcommand == "dynamics") run_dynamics(config, sink, log);
  else if (subcommand == "sweep-temperature") run_sweep_temperature(config, sink, log);
  else if (subcommand == "sweep-angle") run_sweep_angle(config, sink, log);
  else if (subcommand == "toy-model") run_toy(config, sink, log);
  else throw ConfigError("unknown subcommand '" + subcommand + "'");
  sink.flush();
  if (sink.path() != "-") log("wrote ", sink.path());
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& log_stream) {
  CLI::App app{"Steady-state and transient energy transport in emitter networks", "qtransport"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file, scenario, coordinates, out_path, toy_nb;
  std::vector<std::string> overrides, disabled, enabled;
  std::optional<double> scale, tau, kelvin, occupation, gamma_nl;
  std::optional<unsigned> jobs;
  bool quiet = false, print_config = false;

  app.add_option("--config", config_file, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override a key, section.key=value (repeatable)");
  app.add_option("--scenario", scenario, "RP, CH, NH, or a coordinate file");
  app.add_option("--coordinates", coordinates, "coordinate file (label x y z role per line)");
  app.add_option("--scale", scale, "scale factor for coordinate files");
  auto* tau_opt = app.add_option("--tau", tau, "reduced temperature k_B T / (hbar omega_a)");
  auto* kelvin_opt = app.add_option("--kelvin", kelvin, "bath temperature in K");
  auto* n_opt = app.add_option("--n", occupation, "bath occupation");
  tau_opt->excludes(kelvin_opt)->excludes(n_opt);
  kelvin_opt->excludes(n_opt);
  app.add_option("--nB", toy_nb, "toy model cold occupation(s), comma-separated");
  app.add_option("--gamma-nl", gamma_nl, "toy model collective rate in gamma0");
  app.add_option("--jobs", jobs, "parallel sweep workers");
  app.add_option("--out", out_path, "output file, '-' for standard output");
  app.add_option("--disable", disabled, "switch off a term: coherent, local, nonlocal, pump, sink");
  app.add_option("--enable", enabled, "switch on a term");
  app.add_flag("--quiet", quiet, "no progress log");
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  std::string chosen;
  for (const auto& [name, help] : subcommands()) {
    app.add_subcommand(name, help)->callback([&chosen, name = name] { chosen = name; });
  }

  std::vector<std::string> args;
  for (int k = argc - 1; k > 0; --k) args.emplace_back(argv[k]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    emit_error(out, "usage", exit_config, e.what());
    return exit_config;
  }

  std::ostringstream sink_log;
  std::ostream& log_out = quiet ? static_cast<std::ostream&>(sink_log) : log_stream;
  try {
    RunConfig config;
    if (!config_file.empty()) apply_file(config, config_file);
    for (const auto& o : overrides) apply_assignment(config, o);
    if (!scenario.empty()) {
      if (scenario == "RP" || scenario == "CH" || scenario == "NH" || scenario == "rp" || scenario == "ch" ||
          scenario == "nh") {
        config.kind = to_string(parse_ring_kind(scenario));
      } else {
        config.kind = "file";
        config.coordinates = scenario;
      }
    }
    if (!coordinates.empty()) {
      config.kind = "file";
      config.coordinates = coordinates;
    }
    if (scale) config.scale = *scale;
    if (tau) {
      config.bath_unit = TemperatureUnit::tau;
      config.bath_value = *tau;
    }
    if (kelvin) {
      config.bath_unit = TemperatureUnit::kelvin;
      config.bath_value = *kelvin;
    }
    if (occupation) {
      config.bath_unit = TemperatureUnit::occupation;
      config.bath_value = *occupation;
    }
    if (!toy_nb.empty()) set_value(config, "toy.n_b", toy_nb);
    if (gamma_nl) config.toy_gamma_nl = *gamma_nl;
    if (jobs) config.jobs = *jobs;
    if (!out_path.empty()) config.out = out_path;
    for (const auto& t : disabled) set_value(config, "terms." + (t == "hopping" ? std::string("coherent") : t), "false");
    for (const auto& t : enabled) set_value(config, "terms." + (t == "hopping" ? std::string("coherent") : t), "true");

    if (print_config) {
      validate(config);
      out << to_ini(config);
      return exit_ok;
    }
    run(chosen, config, out, log_out);
    return exit_ok;
  } catch (const ConfigError& e) {
    emit_error(out, "config", exit_config, e.what());
    return exit_config;
  } catch (const CoordinateParseError& e) {
    emit_error(out, "config", exit_config, e.what());
    return exit_config;
  } catch (const std::invalid_argument& e) {
    emit_error(out, "config", exit_config, e.what());
    return exit_config;
  } catch (const SolverError& e) {
    emit_error(out, "solver", exit_solver, e.what(), e.residual());
    return exit_solver;
  } catch (const std::exception& e) {
    emit_error(out, "runtime", exit_solver, e.what());
    return exit_solver;
  }
}

}  // namespace qtransport::cli
