#pragma once

#include "qtransport/model.hpp"

#include <Eigen/Dense>

namespace qtransport {

/// Geometric coefficients of the field-induced cross damping. The two
/// transverse coefficients coincide, so only the longitudinal alpha1 and
/// the transverse alpha2 are carried.
struct AlphaCoefficients {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// x is the retarded distance omega_a |r_ij| / c; requires x > 0.
AlphaCoefficients alpha_coefficients(double x);

/// Radial profiles of the dipole-dipole shift: f(x) = (cos x + x sin x)/x^3,
/// g(x) = ((x^2 - 1) cos x - x sin x)/x^3.
double dipole_f(double x);
double dipole_g(double x);

/// Below this retarded distance alpha1/alpha2 are summed from their Taylor
/// series instead of the closed forms.
inline constexpr double alpha_series_crossover = 0.1;

/// Cross-damping rate gamma_ij / gamma0 for two emitters sharing the unit dipole d.
double gamma_ij(const Vec3& r_i, const Vec3& r_j, const Vec3& dipole, double omega_a);

/// Dipole-dipole coupling Lambda_ij / gamma0.
double lambda_ij(const Vec3& r_i, const Vec3& r_j, const Vec3& dipole, double omega_a);

/// Rates of one network at one bath occupation. gamma has unit diagonal
/// (local damping gamma0), lambda has zero diagonal.
struct CouplingTable {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd x_tilde;  // retarded pair distances, zero diagonal
  double occupation = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(gamma.rows()); }
};

/// Evaluates every pair of a geometrically valid network.
CouplingTable build_coupling_table(const NetworkSpec& spec, const BathSpec& bath);

}  // namespace qtransport
