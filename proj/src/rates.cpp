#include "qtransport/rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qtransport {

namespace {

void require_positive(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("retarded distance must be positive and finite");
  }
}

// alpha1 = 3 sum_k (-1)^(k+1) 2k/(2k+1)! x^(2k-2)
// alpha2 = (3/2) sum_k (-1)^(k+1) 4k^2/(2k+1)! x^(2k-2)
AlphaCoefficients alpha_series(double x) {
  const double x2 = x * x;
  double a1 = 0.0, a2 = 0.0;
  double power = 1.0;          // x^(2k-2)
  double inv_fact = 1.0 / 6.0; // 1/(2k+1)!
  double sign = 1.0;
  for (int k = 1; k <= 12; ++k) {
    a1 += sign * 2.0 * k * inv_fact * power;
    a2 += sign * 4.0 * k * k * inv_fact * power;
    power *= x2;
    inv_fact /= (2.0 * k + 2.0) * (2.0 * k + 3.0);
    sign = -sign;
  }
  return {3.0 * a1, 1.5 * a2};
}

struct PairGeometry {
  double x = 0.0;          // omega_a |r_ij| / c
  double cos_sq = 0.0;     // (d . r_hat)^2
};

PairGeometry pair_geometry(const Vec3& r_i, const Vec3& r_j, const Vec3& dipole, double omega_a) {
  if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be positive");
  const Vec3 r = r_j - r_i;
  const double dist = r.norm();
  const double r_min = min_separation_wavelengths * constants::speed_of_light / omega_a;
  if (!(dist >= r_min)) {
    std::ostringstream msg;
    msg << "degenerate separation " << dist << " m (r_min = " << r_min << " m)";
    throw std::invalid_argument(msg.str());
  }
  const double c = dipole.dot(r) / dist;
  return {omega_a * dist / constants::speed_of_light, c * c};
}

}  // namespace

AlphaCoefficients alpha_coefficients(double x) {
  require_positive(x);
  if (x < alpha_series_crossover) return alpha_series(x);
  const double s = std::sin(x), c = std::cos(x);
  const double x3 = x * x * x;
  return {3.0 * (s - x * c) / x3, 1.5 * (x * c + (x * x - 1.0) * s) / x3};
}

double dipole_f(double x) {
  require_positive(x);
  return (std::cos(x) + x * std::sin(x)) / (x * x * x);
}

double dipole_g(double x) {
  require_positive(x);
  return ((x * x - 1.0) * std::cos(x) - x * std::sin(x)) / (x * x * x);
}

double gamma_ij(const Vec3& r_i, const Vec3& r_j, const Vec3& dipole, double omega_a) {
  const auto geo = pair_geometry(r_i, r_j, dipole, omega_a);
  const auto a = alpha_coefficients(geo.x);
  return geo.cos_sq * a.alpha1 + (1.0 - geo.cos_sq) * a.alpha2;
}

double lambda_ij(const Vec3& r_i, const Vec3& r_j, const Vec3& dipole, double omega_a) {
  const auto geo = pair_geometry(r_i, r_j, dipole, omega_a);
  return -0.75 * (2.0 * geo.cos_sq * dipole_f(geo.x) + (1.0 - geo.cos_sq) * dipole_g(geo.x));
}

CouplingTable build_coupling_table(const NetworkSpec& spec, const BathSpec& bath) {
  require_valid(validate_geometry(spec), "invalid network geometry");
  if (!(bath.occupation >= 0.0)) throw std::invalid_argument("bath occupation must be >= 0");
  const auto n = static_cast<Eigen::Index>(spec.size());
  CouplingTable table;
  table.gamma = Eigen::MatrixXd::Identity(n, n);
  table.lambda = Eigen::MatrixXd::Zero(n, n);
  table.x_tilde = Eigen::MatrixXd::Zero(n, n);
  table.occupation = bath.occupation;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& ri = spec.emitters[i].position;
      const auto& rj = spec.emitters[j].position;
      try {
        const auto geo = pair_geometry(ri, rj, spec.dipole_direction, spec.omega_a);
        const auto a = alpha_coefficients(geo.x);
        const double g = geo.cos_sq * a.alpha1 + (1.0 - geo.cos_sq) * a.alpha2;
        const double l = -0.75 * (2.0 * geo.cos_sq * dipole_f(geo.x) +
                                  (1.0 - geo.cos_sq) * dipole_g(geo.x));
        table.gamma(i, j) = table.gamma(j, i) = g;
        table.lambda(i, j) = table.lambda(j, i) = l;
        table.x_tilde(i, j) = table.x_tilde(j, i) = geo.x;
      } catch (const std::invalid_argument& e) {
        std::ostringstream msg;
        msg << "pair (" << i << "," << j << "): " << e.what();
        throw std::invalid_argument(msg.str());
      }
    }
  }
  return table;
}

}  // namespace qtransport
