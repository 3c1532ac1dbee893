#include "qtransport/liouvillian.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace qtransport;
using testing::dense;

namespace {

struct Setup {
  CouplingTable table;
  DriveSpec drive{0.2, 3.0};
  DriveSites sites;
};

Setup random_setup(std::size_t n, double occupation, std::mt19937& rng) {
  Setup s;
  s.table = testing::random_table(n, occupation, rng);
  s.sites = {0, n - 1};
  return s;
}

AssemblyOptions only(bool TermToggles::*field) {
  AssemblyOptions o;
  o.terms = TermToggles::none();
  o.terms.*field = true;
  return o;
}

}  // namespace

TEST_SUITE("liouvillian") {

TEST_CASE("vectorization stacks columns") {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 2, 3, 4;
  const auto v = vectorize(m);
  CHECK(v(1) == cplx(3.0));
  CHECK(v(2) == cplx(2.0));
  CHECK((unvectorize(v) - m).norm() == 0.0);
}

TEST_CASE("lindblad term matches the dense dissipator") {
  std::mt19937 rng(11);
  const std::size_t n = 3;
  const auto rho = testing::random_matrix(8, rng);
  const auto a = ladder_op(0, Ladder::lower, n), b = ladder_op(2, Ladder::lower, n);
  const auto term = lindblad_term(a, b, 0.7);
  CHECK((qtransport::apply(term, rho) - 0.7 * testing::dissipator(dense(a), dense(b), rho)).norm() < 1e-13);
  CHECK(lindblad_term(a, b, 0.0).matrix.nonZeros() == 0);

  const auto h = interaction_hamiltonian(testing::random_table(n, 0.0, rng));
  const Eigen::MatrixXcd hd = dense(h);
  CHECK((qtransport::apply(commutator_term(h), rho) - cplx(0, -1) * (hd * rho - rho * hd)).norm() < 1e-13);
}

TEST_CASE("single excited atom decays at gamma0") {
  CouplingTable t;
  t.gamma = Eigen::MatrixXd::Ones(1, 1);
  t.lambda = Eigen::MatrixXd::Zero(1, 1);
  t.x_tilde = Eigen::MatrixXd::Zero(1, 1);
  const auto l = assemble(t, {}, {}, {});
  const auto d = qtransport::apply(l, DensityMatrix::basis_state(1, 1).matrix());
  CHECK(d(1, 1).real() == doctest::Approx(-1.0));
  CHECK(d(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("generator conserves trace and Hermiticity") {
  std::mt19937 rng(5);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto s = random_setup(n, 0.4, rng);
    const auto l = assemble(s.table, s.drive, s.sites);
    CHECK(trace_annihilation_error(l) < 1e-12);
    for (int trial = 0; trial < 25; ++trial) {
      const auto rho = testing::random_state(n, rng).matrix();
      CHECK(std::abs(qtransport::apply(l, rho).trace()) < 1e-12 * rho.norm());
      const auto x = testing::random_matrix(rho.rows(), rng);
      const auto lhs = qtransport::apply(l, Eigen::MatrixXcd(x.adjoint()));
      const auto rhs = Eigen::MatrixXcd(qtransport::apply(l, x).adjoint());
      CHECK((lhs - rhs).norm() < 1e-12 * x.norm());
    }
  }
}

TEST_CASE("assembly is additive over terms") {
  std::mt19937 rng(8);
  const auto s = random_setup(3, 0.7, rng);
  const auto full = assemble(s.table, s.drive, s.sites);
  auto sum = zero_superoperator(3);
  for (auto field : {&TermToggles::coherent, &TermToggles::local, &TermToggles::nonlocal,
                     &TermToggles::pump, &TermToggles::sink}) {
    sum = sum + assemble(s.table, s.drive, s.sites, only(field));
  }
  CHECK(Eigen::MatrixXcd(full.matrix - sum.matrix).norm() < 1e-14);
  CHECK(sum.terms == full.terms);
}

TEST_CASE("unitary part conserves purity") {
  std::mt19937 rng(9);
  const auto s = random_setup(3, 0.0, rng);
  const auto l = assemble(s.table, s.drive, s.sites, only(&TermToggles::coherent));
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = testing::random_state(3, rng).matrix();
    // d/dt Tr rho^2 = 2 Tr(rho L rho)
    CHECK(std::abs((rho * qtransport::apply(l, rho)).trace()) < 1e-13);
  }
}

TEST_CASE("thermal product state is stationary without drive") {
  std::mt19937 rng(2);
  for (double nbar : {0.0, 0.3, 2.0}) {
    const auto s = random_setup(4, nbar, rng);
    const double p = nbar / (1.0 + 2.0 * nbar);
    const auto gibbs = DensityMatrix::product({p, p, p, p}).matrix();
    const auto l = assemble(s.table, {}, s.sites);
    CHECK(qtransport::apply(l, gibbs).norm() < 1e-13);
  }
}

TEST_CASE("pump adds energy and sink removes it") {
  std::mt19937 rng(4);
  const auto s = random_setup(2, 0.0, rng);
  const auto g = DensityMatrix::ground(2).matrix();
  const auto pump = qtransport::apply(assemble(s.table, s.drive, s.sites, only(&TermToggles::pump)), g);
  CHECK(pump(2, 2).real() == doctest::Approx(s.drive.gamma_in));
  const auto e = DensityMatrix::basis_state(2, 1).matrix();
  const auto sink = qtransport::apply(assemble(s.table, s.drive, s.sites, only(&TermToggles::sink)), e);
  CHECK(sink(1, 1).real() == doctest::Approx(-s.drive.gamma_out));
}

TEST_CASE("assembly argument checks") {
  std::mt19937 rng(1);
  auto s = random_setup(3, 0.1, rng);
  CHECK_THROWS(assemble(s.table, {-1.0, 0.0}, s.sites));
  CHECK_THROWS(assemble(s.table, s.drive, {5, 0}));
  AssemblyOptions bad;
  bad.occupations = OccupationOverride{{0.1, 0.2}, 0.1};
  CHECK_THROWS(assemble(s.table, s.drive, s.sites, bad));
  CHECK_THROWS(zero_superoperator(3) + zero_superoperator(2));
}

TEST_CASE("balanced sector is invariant and round-trips") {
  std::mt19937 rng(6);
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    const auto sector = balanced_sector(n);
    std::size_t expected = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      std::size_t binom = 1;
      for (std::size_t m = 1; m <= k; ++m) binom = binom * (n - m + 1) / m;
      expected += binom * binom;
    }
    CHECK(static_cast<std::size_t>(sector.size()) == expected);

    const auto s = random_setup(n, 0.5, rng);
    const auto l = assemble(s.table, s.drive, s.sites);
    for (Eigen::Index col = 0; col < l.matrix.outerSize(); ++col) {
      if (sector.position[col] < 0) continue;
      for (SparseMatrixC::InnerIterator it(l.matrix, col); it; ++it) {
        CHECK(sector.position[it.row()] >= 0);
      }
    }
    const auto rho = testing::random_state(n, rng).matrix();
    const Eigen::VectorXcd v = vectorize(rho);
    const Eigen::VectorXcd back = scatter(gather(v, sector), sector);
    CHECK_FALSE(inside_sector(rho, sector, 1e-12));
    CHECK(inside_sector(unvectorize(back), sector));
    CHECK(inside_sector(DensityMatrix::ground(n).matrix(), sector));

    const auto block = restrict_to(l.matrix, sector);
    CHECK(block.rows() == sector.size());
    const Eigen::VectorXcd lv = l.matrix * back;
    CHECK((gather(lv, sector) - block * gather(v, sector)).norm() < 1e-12);
  }
  CHECK(full_space(2).size() == 16);
}

TEST_CASE("pattern dump lists every nonzero") {
  std::mt19937 rng(10);
  const auto s = random_setup(2, 0.5, rng);
  const auto l = assemble(s.table, s.drive, s.sites);
  std::ostringstream out;
  write_pattern_csv(out, l);
  const std::string text = out.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == l.matrix.nonZeros() + 1);
}

}  // TEST_SUITE
