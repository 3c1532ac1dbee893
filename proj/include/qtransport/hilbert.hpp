#pragma once

#include "qtransport/rates.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <vector>

namespace qtransport {

using cplx = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<cplx>;

/// Hard cap on the register size; the superoperator grows as 4^N.
inline constexpr std::size_t max_sites = 12;

/// Computational basis: site 0 is the most significant bit of a basis
/// index, and a set bit means the emitter is excited.
inline std::size_t site_mask(std::size_t site, std::size_t num_sites) {
  return std::size_t{1} << (num_sites - 1 - site);
}

/// Operator on the 2^N register. The matrix is compressed with no
/// duplicate coordinates.
struct SparseOperator {
  std::size_t num_sites = 0;
  SparseMatrixC matrix;

  std::size_t dimension() const { return std::size_t{1} << num_sites; }
};

enum class Ladder { raise, lower };

/// sigma^+ or sigma^- of one site, identity elsewhere.
SparseOperator ladder_op(std::size_t site, Ladder kind, std::size_t num_sites);

/// sigma^+ sigma^- of one site.
SparseOperator number_op(std::size_t site, std::size_t num_sites);

/// sum_i sigma_i^+ sigma_i^-, in units of hbar*omega_a.
SparseOperator atomic_hamiltonian(std::size_t num_sites);

/// sum_{i != j} Lambda_ij sigma_i^- sigma_j^+, in units of hbar*gamma0.
SparseOperator interaction_hamiltonian(const CouplingTable& table);

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);

/// State of the N-emitter register. The shape is enforced on construction;
/// the physical invariants (Hermitian, unit trace, positive) are checked on
/// demand because numerical solutions only satisfy them to a tolerance.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXcd matrix);

  static DensityMatrix ground(std::size_t num_sites);
  /// Product state of independent emitters with the given excited populations.
  static DensityMatrix product(const std::vector<double>& excited_populations);
  /// Pure computational basis state |index><index|.
  static DensityMatrix basis_state(std::size_t num_sites, std::size_t index);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t num_sites() const { return num_sites_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

  cplx trace() const { return matrix_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double purity() const;
  /// excited population of one site
  double population(std::size_t site) const;
  /// Expectation value Tr(op rho).
  cplx expectation(const SparseOperator& op) const;

  struct Check {
    bool hermitian = false;
    bool unit_trace = false;
    bool positive = false;
    bool ok() const { return hermitian && unit_trace && positive; }
  };
  Check check(double herm_tol = 1e-10, double trace_tol = 1e-10, double pos_tol = 1e-8) const;

 private:
  Eigen::MatrixXcd matrix_;
  std::size_t num_sites_ = 0;
};

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qtransport
