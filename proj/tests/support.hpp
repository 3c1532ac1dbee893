#pragma once

#include "qtransport/hilbert.hpp"
#include "qtransport/liouvillian.hpp"
#include "qtransport/model.hpp"
#include "qtransport/rates.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace qtransport::testing {

inline Eigen::MatrixXcd random_matrix(std::size_t dim, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(normal(rng), normal(rng));
  return a;
}

/// Full-rank random state A A^dagger / Tr.
inline DensityMatrix random_state(std::size_t num_sites, std::mt19937& rng) {
  const Eigen::MatrixXcd a = random_matrix(std::size_t{1} << num_sites, rng);
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix(rho);
}

/// Random table with symmetric entries; |gamma_ij| kept small enough that
/// the collective dissipator stays completely positive.
inline CouplingTable random_table(std::size_t n, double occupation, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CouplingTable t;
  t.gamma = Eigen::MatrixXd::Identity(n, n);
  t.lambda = Eigen::MatrixXd::Zero(n, n);
  t.x_tilde = Eigen::MatrixXd::Zero(n, n);
  t.occupation = occupation;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j) {
      t.gamma(i, j) = t.gamma(j, i) = 0.8 * u(rng) / static_cast<double>(n);
      t.lambda(i, j) = t.lambda(j, i) = u(rng);
      t.x_tilde(i, j) = t.x_tilde(j, i) = 1.0;
    }
  }
  return t;
}

/// Dense matrix of a sparse operator.
inline Eigen::MatrixXcd dense(const SparseOperator& op) { return Eigen::MatrixXcd(op.matrix); }

/// D[A,B] rho = A rho B^dag - 1/2 {B^dag A, rho}, evaluated densely.
inline Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                   const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd bda = b.adjoint() * a;
  return a * rho * b.adjoint() - 0.5 * (bda * rho + rho * bda);
}

}  // namespace qtransport::testing
