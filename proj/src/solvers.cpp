#include "qtransport/solvers.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <list>
#include <memory>
#include <optional>
#include <sstream>

namespace qtransport {

SolverError::SolverError(Kind kind, const std::string& what, double residual, double time)
    : std::runtime_error(what), kind_(kind), residual_(residual), time_(time) {}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using SparseLUC = Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>>;

std::vector<Eigen::Index> diagonal_positions(const Subspace& sub) {
  const std::size_t d = std::size_t{1} << sub.num_sites;
  std::vector<Eigen::Index> pos(d);
  for (std::size_t i = 0; i < d; ++i) pos[i] = sub.position[i + d * i];
  return pos;
}

DensityMatrix to_state(const Eigen::VectorXcd& reduced, const Subspace& sub) {
  return DensityMatrix(unvectorize(scatter(reduced, sub)));
}

// Real coordinates of a Hermitian matrix restricted to a subspace: rho(r,r)
// for diagonal entries, Re and Im of rho(r,c) for r < c. A Hermitian state
// has as many real coordinates as the subspace has complex entries, and the
// generator maps Hermitian matrices to Hermitian ones, so the steady state
// can be solved in real arithmetic at the same dimension.
struct HermitianCoordinates {
  std::vector<Eigen::Index> index;  // subspace position -> first real coordinate
  Eigen::Index size = 0;

  explicit HermitianCoordinates(const Subspace& sub) : index(sub.members.size(), -1) {
    const std::size_t d = std::size_t{1} << sub.num_sites;
    for (std::size_t k = 0; k < sub.members.size(); ++k) {
      const auto f = static_cast<std::size_t>(sub.members[k]);
      const std::size_t r = f % d, c = f / d;
      if (r == c) {
        index[k] = size++;
      } else if (r < c) {
        index[k] = size;
        size += 2;
      }
    }
    for (std::size_t k = 0; k < sub.members.size(); ++k) {
      const auto f = static_cast<std::size_t>(sub.members[k]);
      const std::size_t r = f % d, c = f / d;
      if (r > c) index[k] = index[sub.position[c + d * r]];
    }
  }
};

// Real form of a subspace block G acting on Hermitian coordinates.
Eigen::SparseMatrix<double> real_form(const SparseMatrixC& g, const Subspace& sub,
                                      const HermitianCoordinates& hc) {
  const std::size_t d = std::size_t{1} << sub.num_sites;
  auto kind = [&](Eigen::Index k) {
    const auto f = static_cast<std::size_t>(sub.members[k]);
    const std::size_t r = f % d, c = f / d;
    return r == c ? 0 : r < c ? 1 : -1;
  };
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(2 * g.nonZeros()));
  for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
    const int in = kind(col);
    const Eigen::Index m = hc.index[col];
    for (SparseMatrixC::InnerIterator it(g, col); it; ++it) {
      const int out = kind(it.row());
      if (out < 0) continue;
      const Eigen::Index o = hc.index[it.row()];
      // column of the input coordinate(s) this entry feeds: e_rr, or
      // a (e_rc + e_cr) + b (i e_rc - i e_cr)
      std::array<std::pair<Eigen::Index, cplx>, 2> src{};
      int ns = 0;
      if (in == 0) {
        src[ns++] = {m, it.value()};
      } else {
        src[ns++] = {m, it.value()};
        src[ns++] = {m + 1, it.value() * cplx(0.0, double(in))};
      }
      for (int q = 0; q < ns; ++q) {
        t.emplace_back(o, src[q].first, src[q].second.real());
        if (out == 1) t.emplace_back(o + 1, src[q].first, src[q].second.imag());
      }
    }
  }
  Eigen::SparseMatrix<double> out(hc.size, hc.size);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

Eigen::MatrixXcd from_coordinates(const Eigen::VectorXd& x, const Subspace& sub,
                                  const HermitianCoordinates& hc) {
  const std::size_t d = std::size_t{1} << sub.num_sites;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t k = 0; k < sub.members.size(); ++k) {
    const auto f = static_cast<std::size_t>(sub.members[k]);
    const std::size_t r = f % d, c = f / d;
    const Eigen::Index m = hc.index[k];
    if (r == c) rho(r, c) = x(m);
    else if (r < c) rho(r, c) = cplx(x(m), x(m + 1));
    else rho(r, c) = cplx(x(m), -x(m + 1));
  }
  return rho;
}

}  // namespace

SteadyStateResult steady_state(const SparseSuperoperator& l, const SteadyStateOptions& options) {
  const std::size_t n = l.num_sites;
  const Subspace sector = balanced_sector(n);
  const SparseMatrixC block = restrict_to(l.matrix, sector);
  const auto diag = diagonal_positions(sector);
  const HermitianCoordinates hc(sector);
  const Eigen::SparseMatrix<double> real_block = real_form(block, sector, hc);
  // The ground-state population equation is redundant given trace
  // conservation; its row becomes the trace constraint.
  const Eigen::Index replaced = hc.index[diag[0]];

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(real_block.nonZeros()) + diag.size());
  for (Eigen::Index k = 0; k < real_block.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(real_block, k); it; ++it) {
      if (it.row() != replaced) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (auto p : diag) t.emplace_back(replaced, hc.index[p], 1.0);
  Eigen::SparseMatrix<double> system(hc.size, hc.size);
  system.setFromTriplets(t.begin(), t.end());
  system.makeCompressed();

  // The sector is ordered block tridiagonally by excitation number; the
  // natural column order gives less fill than COLAMD on it.
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
  lu.analyzePattern(system);
  lu.factorize(system);
  if (lu.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::non_unique_steady_state,
                      "steady state is not unique: trace-constrained system is singular (" +
                          lu.lastErrorMessage() + ")",
                      nan, nan);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(hc.size);
  rhs(replaced) = 1.0;
  Eigen::VectorXd x = lu.solve(rhs);
  for (int k = 0; k < options.max_refinements; ++k) {
    const Eigen::VectorXd r = rhs - system * x;
    if (r.norm() <= 1e-15 * x.norm()) break;
    x += lu.solve(r);
  }
  if (!x.allFinite()) {
    throw SolverError(SolverError::Kind::non_unique_steady_state,
                      "steady state is not unique: solution is not finite", nan, nan);
  }

  Eigen::MatrixXcd rho = from_coordinates(x, sector, hc);
  rho /= rho.trace();

  SteadyStateResult result{DensityMatrix(rho), 0.0, std::nullopt};
  const Eigen::VectorXcd v = vectorize(rho);
  result.residual = (l.matrix * v).norm() / v.norm();

  if (options.nullspace_gap && n <= 5) {
    const Eigen::MatrixXcd dense(block);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense);
    const auto& s = svd.singularValues();  // descending
    const Eigen::Index m = s.size();
    if (m >= 2) {
      result.nullspace_gap = s(m - 1) / s(m - 2);
      if (s(m - 2) <= 1e-10 * s(0)) {
        throw SolverError(SolverError::Kind::non_unique_steady_state,
                          "steady state is not unique: nullspace dimension > 1", result.residual,
                          nan);
      }
    }
  }
  if (!(result.residual <= options.residual_tolerance)) {
    std::ostringstream msg;
    msg << "steady state did not converge: residual " << result.residual << " > "
        << options.residual_tolerance;
    throw SolverError(SolverError::Kind::not_converged, msg.str(), result.residual, nan);
  }
  return result;
}

std::vector<double> log_time_grid(double t_min, double t_max, std::size_t points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
    throw std::invalid_argument("log grid needs 0 < t_min < t_max and >= 2 points");
  }
  std::vector<double> g(points);
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = std::exp(a + (b - a) * double(k) / double(points - 1));
  }
  g.front() = t_min;
  g.back() = t_max;
  return g;
}

namespace {

// Linear system y' = G y with y = (rho restricted to a subspace, U_P, U_E).
struct AugmentedSystem {
  SparseMatrixC g;
  Subspace sub;
  Eigen::Index state_size = 0;
};

AugmentedSystem make_system(const SparseSuperoperator& l, const Subspace& sub,
                            const EnergyMeters& meters) {
  const std::size_t n = l.num_sites;
  const std::size_t d = std::size_t{1} << n;
  const SparseMatrixC block = restrict_to(l.matrix, sub);
  const Eigen::Index s = block.rows();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(block.nonZeros()) + 2 * d);
  for (Eigen::Index k = 0; k < block.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(block, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  const auto diag = diagonal_positions(sub);
  const bool pump = meters.drive.gamma_in > 0.0, sink = meters.drive.gamma_out > 0.0;
  if ((pump && meters.sites.pump >= n) || (sink && meters.sites.extract >= n)) {
    throw std::out_of_range("energy meter site out of range");
  }
  for (std::size_t b = 0; b < d; ++b) {
    if (pump && !(b & site_mask(meters.sites.pump, n))) t.emplace_back(s, diag[b], meters.drive.gamma_in);
    if (sink && (b & site_mask(meters.sites.extract, n))) t.emplace_back(s + 1, diag[b], meters.drive.gamma_out);
  }
  AugmentedSystem sys;
  sys.g = SparseMatrixC(s + 2, s + 2);
  sys.g.setFromTriplets(t.begin(), t.end());
  sys.g.makeCompressed();
  sys.sub = sub;
  sys.state_size = s;
  return sys;
}

struct StepError {
  double scaled = 0.0;    // max |e_i| / (atol + rtol * |y_i|)
  double absolute = 0.0;  // max |e_i|
};

StepError error_norm(const Eigen::VectorXcd& err, const Eigen::VectorXcd& y0,
                     const Eigen::VectorXcd& y1, double rtol, double atol) {
  StepError e;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double a = std::abs(err(i));
    e.scaled = std::max(e.scaled, a / sc);
    e.absolute = std::max(e.absolute, a);
  }
  return e;
}

// Dormand-Prince 5(4) with Hairer's stiffness test.
class DormandPrince {
 public:
  explicit DormandPrince(const SparseMatrixC& g) : g_(g) {}

  struct Result {
    Eigen::VectorXcd y;
    Eigen::VectorXcd k_last;  // G y, reused as the next first stage
    StepError error;
    double h_lambda = 0.0;  // stiffness estimate |h * lambda|
  };

  Result step(const Eigen::VectorXcd& y, const Eigen::VectorXcd& k1, double h, double rtol,
              double atol) const {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const Eigen::VectorXcd k2 = g_ * (y + h * (a21 * k1));
    const Eigen::VectorXcd k3 = g_ * (y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXcd k4 = g_ * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXcd k5 = g_ * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXcd y6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const Eigen::VectorXcd k6 = g_ * y6;
    Result r;
    r.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    r.k_last = g_ * r.y;
    const Eigen::VectorXcd& k7 = r.k_last;
    const Eigen::VectorXcd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    r.error = error_norm(err, y, r.y, rtol, atol);
    const double den = (r.y - y6).squaredNorm();
    if (den > 0.0) r.h_lambda = std::abs(h) * std::sqrt((k7 - k6).squaredNorm() / den);
    return r;
  }

  Eigen::VectorXcd derivative(const Eigen::VectorXcd& y) const { return g_ * y; }

 private:
  const SparseMatrixC& g_;
};

// Three-stage Radau IIA on a linear system: one step applies the (2,3)
// Pade approximant of exp(hG), Q(hG)^{-1} P(hG), with Q factored over its
// roots so each factor is a sparse shifted solve. L-stable, order 5.
class RadauLinear {
 public:
  explicit RadauLinear(const SparseMatrixC& g) : g_(g) {
    // Q(z) = 1 - 3z/5 + 3z^2/20 - z^3/60, roots of z^3 - 9z^2 + 36z - 60
    Eigen::Vector4d coeffs(-60.0, 36.0, -9.0, 1.0);
    Eigen::PolynomialSolver<double, 3> solver(coeffs);
    for (int k = 0; k < 3; ++k) roots_[k] = solver.roots()(k);
  }

  Eigen::VectorXcd step(const Eigen::VectorXcd& y, double h) {
    const Eigen::VectorXcd gy = g_ * y;
    Eigen::VectorXcd x = y + (0.4 * h) * gy + (0.05 * h * h) * (g_ * gy);
    auto& f = factors(h);
    for (auto& lu : f) x = lu->solve(x);
    return x;
  }

 private:
  using Factors = std::array<std::unique_ptr<SparseLUC>, 3>;
  struct Entry {
    double h;
    Factors f;
  };

  Factors& factors(double h) {
    for (auto it = cache_.begin(); it != cache_.end(); ++it) {
      if (it->h == h) {
        cache_.splice(cache_.begin(), cache_, it);
        return cache_.front().f;
      }
    }
    Entry e{h, {}};
    SparseMatrixC id(g_.rows(), g_.cols());
    id.setIdentity();
    for (int k = 0; k < 3; ++k) {
      const SparseMatrixC m = id - (cplx(h) / roots_[k]) * g_;
      e.f[k] = std::make_unique<SparseLUC>();
      e.f[k]->analyzePattern(m);
      e.f[k]->factorize(m);
      if (e.f[k]->info() != Eigen::Success) {
        throw SolverError(SolverError::Kind::not_converged,
                          "implicit step factorization failed: " + e.f[k]->lastErrorMessage(), nan,
                          nan);
      }
    }
    cache_.push_front(std::move(e));
    if (cache_.size() > max_cached) cache_.pop_back();
    return cache_.front().f;
  }

  static constexpr std::size_t max_cached = 8;
  const SparseMatrixC& g_;
  std::array<cplx, 3> roots_;
  std::list<Entry> cache_;
};

// Step-doubling estimate for one implicit step; the order-5 scheme gives
// the (2^5 - 1) divisor.
StepError implicit_error(RadauLinear& stepper, const Eigen::VectorXcd& y, double h,
                         const EvolveOptions& options, Eigen::VectorXcd* out = nullptr) {
  const Eigen::VectorXcd full = stepper.step(y, h);
  Eigen::VectorXcd half = stepper.step(stepper.step(y, 0.5 * h), 0.5 * h);
  const auto e = error_norm((half - full) / 31.0, y, half, options.rtol, options.atol);
  if (out) *out = std::move(half);
  return e;
}

double floor_pow2(double h) { return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(h)))); }

}  // namespace

Trajectory evolve(const SparseSuperoperator& l, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EnergyMeters& meters,
                  const EvolveOptions& options) {
  if (rho0.num_sites() != l.num_sites) throw std::invalid_argument("initial state size mismatch");
  if (!rho0.check().ok()) throw std::invalid_argument("initial state is not a valid density matrix");
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
      throw std::invalid_argument("time grid must be non-negative and strictly increasing");
    }
  }
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw std::invalid_argument("tolerances must be positive");

  const std::size_t n = l.num_sites;
  const Subspace balanced = balanced_sector(n);
  const Subspace sub = inside_sector(rho0.matrix(), balanced) ? balanced : full_space(n);
  const AugmentedSystem sys = make_system(l, sub, meters);
  const Eigen::Index s = sys.state_size;

  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(s + 2);
  y.head(s) = gather(vectorize(rho0.matrix()), sub);

  Trajectory traj;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(to_state(y.head(s), sub));
    traj.pumped.push_back(y(s).real());
    traj.extracted.push_back(y(s + 1).real());
  };

  DormandPrince explicit_stepper(sys.g);
  std::unique_ptr<RadauLinear> implicit_stepper;
  bool use_implicit = options.method == Integrator::implicit;
  if (use_implicit) implicit_stepper = std::make_unique<RadauLinear>(sys.g);

  double t = 0.0;
  double h = options.initial_step;
  int stiff_count = 0, nonstiff_count = 0;
  Eigen::VectorXcd k1 = explicit_stepper.derivative(y);

  auto switch_to_implicit = [&](double h_new) {
    use_implicit = true;
    traj.stiffness_switch = t;
    if (!implicit_stepper) implicit_stepper = std::make_unique<RadauLinear>(sys.g);
    h = h_new;
  };

  // Automatic mode also probes the implicit scheme: every probe_interval
  // explicit steps one step-doubled implicit step of size H = 64 h is
  // tried from the current state. Once its error estimate passes, the
  // explicit stepper is accuracy-bound on modes the implicit one may step
  // over, so integration continues implicitly.
  std::size_t probe_interval = 500, steps_since_probe = 0;
  const bool probing = options.method == Integrator::automatic;

  for (double target : t_grid) {
    while (t < target) {
      if (traj.accepted_steps + traj.rejected_steps >= options.max_steps) {
        throw SolverError(SolverError::Kind::not_converged,
                          "step budget exhausted at t = " + std::to_string(t), nan, t);
      }
      const double h_min = 1e-14 * std::max(1.0, t);
      if (h < h_min) {
        if (!use_implicit && options.method == Integrator::automatic) {
          switch_to_implicit(1e3 * h_min);
        } else {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t;
          throw SolverError(SolverError::Kind::step_underflow, msg.str(), nan, t);
        }
      }
      if (!use_implicit) {
        if (probing && steps_since_probe >= probe_interval) {
          if (!implicit_stepper) implicit_stepper = std::make_unique<RadauLinear>(sys.g);
          const double big = floor_pow2(64.0 * h);
          steps_since_probe = 0;
          if (implicit_error(*implicit_stepper, y, big, options).scaled <= 1.0) {
            switch_to_implicit(big);
            continue;
          }
          probe_interval = std::min<std::size_t>(2 * probe_interval, 2000);
        }
        const double remaining = target - t;
        const double hs = std::min(h, remaining);
        const auto r = explicit_stepper.step(y, k1, hs, options.rtol, options.atol);
        const double err = r.error.scaled;
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
          t = (hs == remaining) ? target : t + hs;
          y = r.y;
          k1 = r.k_last;
          traj.error_estimate += r.error.absolute;
          ++traj.accepted_steps;
          ++steps_since_probe;
          h = hs == h ? hs * factor : std::max(h, hs * factor);
          if (r.h_lambda > 3.25) {
            nonstiff_count = 0;
            if (++stiff_count >= 15 && options.method == Integrator::automatic) switch_to_implicit(h);
          } else if (++nonstiff_count >= 6) {
            stiff_count = 0;
          }
        } else {
          ++traj.rejected_steps;
          h = hs * factor;
        }
      } else {
        const double remaining = target - t;
        const double hq = floor_pow2(h);
        const double hs = hq >= remaining ? remaining : hq;
        Eigen::VectorXcd half;
        const auto e = implicit_error(*implicit_stepper, y, hs, options, &half);
        const double factor = e.scaled == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(e.scaled, -1.0 / 6.0), 0.2, 4.0);
        if (e.scaled <= 1.0) {
          t = (hs == remaining) ? target : t + hs;
          y = half;
          traj.error_estimate += e.absolute;
          ++traj.accepted_steps;
          h = hs == hq ? hs * factor : std::max(h, hs * factor);
        } else {
          ++traj.rejected_steps;
          h = hs * factor;
        }
      }
    }
    record(target);
  }
  return traj;
}

}  // namespace qtransport
