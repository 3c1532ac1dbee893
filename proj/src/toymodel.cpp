#include "qtransport/toymodel.hpp"

#include "qtransport/observables.hpp"
#include "qtransport/solvers.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace qtransport::toy {

void ToyParams::validate() const {
  if (!(n_h >= 0.0) || !(n_b >= 0.0) || !std::isfinite(n_h) || !std::isfinite(n_b)) {
    throw std::invalid_argument("toy model occupations must be finite and >= 0");
  }
  if (!(gamma_nl >= 0.0) || !(gamma_nl < 1.0)) {
    throw std::invalid_argument("toy model needs 0 <= gamma_nl < gamma0");
  }
}

double denominator(const ToyParams& p) {
  const double nb = p.n_b, nh = p.n_h, g2 = p.gamma_nl * p.gamma_nl;
  const double s = 1.0 + nb + nh;
  return (1.0 + 2.0 * nb) * (1.0 + 2.0 * nh) * s * s -
         g2 * (1.0 + nb * (7.0 + 13.0 * nb + 8.0 * nb * nb) + nh +
               4.0 * nh * nb * (3.0 + 6.0 * nb + 4.0 * nb * nb) - nh * nh);
}

double coherence_closed_form(const ToyParams& p) {
  p.validate();
  const double f = denominator(p);
  if (f == 0.0) throw SingularParameters("toy model denominator vanishes");
  return p.gamma_nl * (1.0 + p.n_h + p.n_b) * (p.n_b - p.n_h) / (2.0 * f);
}

CouplingTable coupling_table(const ToyParams& p) {
  CouplingTable t;
  t.gamma = Eigen::Matrix2d{{1.0, p.gamma_nl}, {p.gamma_nl, 1.0}};
  t.lambda = Eigen::Matrix2d::Zero();
  t.x_tilde = Eigen::Matrix2d::Zero();
  t.occupation = p.n_b;
  return t;
}

AssemblyOptions assembly_options(const ToyParams& p) {
  AssemblyOptions o;
  o.terms.coherent = false;
  o.terms.pump = false;
  o.terms.sink = false;
  o.occupations = OccupationOverride{{p.n_h, p.n_b}, p.n_b};
  return o;
}

double coherence_numeric(const ToyParams& p) {
  p.validate();
  const auto l = assemble(coupling_table(p), DriveSpec{}, DriveSites{0, 1}, assembly_options(p));
  const auto ss = steady_state(l);
  return pair_coherence(ss.rho, 0, 1).real();
}

namespace {

// d/dn_h of N/(2F) has the sign of N' F - N F'.
double stationarity(double nb, double gnl, double nh) {
  const double s = 1.0 + nb + nh, g2 = gnl * gnl;
  const double num = gnl * s * (nb - nh);
  const double dnum = gnl * (-1.0 - 2.0 * nh);
  const double f = denominator({nh, nb, gnl});
  const double df = (1.0 + 2.0 * nb) * (2.0 * s * s + 2.0 * (1.0 + 2.0 * nh) * s) -
                    g2 * (1.0 + 4.0 * nb * (3.0 + 6.0 * nb + 4.0 * nb * nb) - 2.0 * nh);
  return dnum * f - num * df;
}

}  // namespace

Optimum optimal_hot_occupation(double n_b, double gamma_nl, double tol) {
  ToyParams{0.0, n_b, gamma_nl}.validate();
  if (gamma_nl == 0.0) throw std::runtime_error("no interior maximum: coherence vanishes for gamma_nl = 0");
  // coarse logarithmic scan of |c| above n_B
  const int samples = 400;
  const double lo = std::max(n_b, 1e-6), hi = 1e6 * (1.0 + n_b);
  std::vector<double> grid(samples), value(samples);
  int best = 0;
  for (int k = 0; k < samples; ++k) {
    grid[k] = lo * std::pow(hi / lo, double(k) / (samples - 1));
    value[k] = std::abs(coherence_closed_form({grid[k], n_b, gamma_nl}));
    if (value[k] > value[best]) best = k;
  }
  if (best == 0 || best == samples - 1) {
    throw std::runtime_error("no interior maximum of |c| found for n_B = " + std::to_string(n_b));
  }
  double a = grid[best - 1], b = grid[best + 1];
  auto df = [&](double x) { return stationarity(n_b, gamma_nl, x); };
  if (df(a) * df(b) > 0.0) throw std::runtime_error("|c| maximum is not bracketed");
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      df, a, b, [tol](double x, double y) { return std::abs(x - y) <= 0.1 * tol; }, iters);
  Optimum out;
  out.n_h = 0.5 * (r.first + r.second);
  out.coherence = coherence_closed_form({out.n_h, n_b, gamma_nl});
  return out;
}

}  // namespace qtransport::toy
