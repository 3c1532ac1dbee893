#include "qtransport/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <stdexcept>
#include <string>

namespace qtransport {

namespace {

void require_sites(std::size_t num_sites) {
  if (num_sites < 1 || num_sites > max_sites) {
    throw std::invalid_argument("register size must be in [1, " + std::to_string(max_sites) +
                                "], got " + std::to_string(num_sites));
  }
}

SparseOperator from_triplets(std::size_t num_sites, const std::vector<Eigen::Triplet<cplx>>& t) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_sites);
  SparseOperator op{num_sites, SparseMatrixC(dim, dim)};
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  return op;
}

}  // namespace

SparseOperator ladder_op(std::size_t site, Ladder kind, std::size_t num_sites) {
  require_sites(num_sites);
  if (site >= num_sites) {
    throw std::out_of_range("site " + std::to_string(site) + " out of range for " +
                            std::to_string(num_sites) + " sites");
  }
  const std::size_t dim = std::size_t{1} << num_sites;
  const std::size_t mask = site_mask(site, num_sites);
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(dim / 2);
  for (std::size_t b = 0; b < dim; ++b) {
    const bool excited = (b & mask) != 0;
    if (kind == Ladder::raise && !excited) t.emplace_back(b | mask, b, 1.0);
    if (kind == Ladder::lower && excited) t.emplace_back(b & ~mask, b, 1.0);
  }
  return from_triplets(num_sites, t);
}

SparseOperator number_op(std::size_t site, std::size_t num_sites) {
  require_sites(num_sites);
  if (site >= num_sites) throw std::out_of_range("site out of range");
  const std::size_t dim = std::size_t{1} << num_sites;
  const std::size_t mask = site_mask(site, num_sites);
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & mask) t.emplace_back(b, b, 1.0);
  }
  return from_triplets(num_sites, t);
}

SparseOperator atomic_hamiltonian(std::size_t num_sites) {
  require_sites(num_sites);
  const std::size_t dim = std::size_t{1} << num_sites;
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 1; b < dim; ++b) t.emplace_back(b, b, double(std::popcount(b)));
  return from_triplets(num_sites, t);
}

SparseOperator interaction_hamiltonian(const CouplingTable& table) {
  const std::size_t n = table.size();
  require_sites(n);
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double lam = table.lambda(i, j);
      if (i == j || lam == 0.0) continue;
      const std::size_t mi = site_mask(i, n), mj = site_mask(j, n);
      // sigma_i^- sigma_j^+ : i excited -> ground, j ground -> excited
      for (std::size_t b = 0; b < dim; ++b) {
        if ((b & mi) && !(b & mj)) t.emplace_back((b & ~mi) | mj, b, lam);
      }
    }
  }
  return from_triplets(n, t);
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.num_sites != b.num_sites) throw std::invalid_argument("operator size mismatch");
  SparseOperator out{a.num_sites, SparseMatrixC(a.matrix * b.matrix)};
  out.matrix.prune(cplx(0.0));
  out.matrix.makeCompressed();
  return out;
}

SparseOperator adjoint(const SparseOperator& a) {
  SparseOperator out{a.num_sites, SparseMatrixC(a.matrix.adjoint())};
  out.matrix.makeCompressed();
  return out;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  const auto dim = static_cast<std::size_t>(matrix_.rows());
  if (matrix_.rows() != matrix_.cols() || dim < 2 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("density matrix must be square with dimension 2^N");
  }
  num_sites_ = static_cast<std::size_t>(std::countr_zero(dim));
  require_sites(num_sites_);
}

DensityMatrix DensityMatrix::ground(std::size_t num_sites) {
  return basis_state(num_sites, 0);
}

DensityMatrix DensityMatrix::basis_state(std::size_t num_sites, std::size_t index) {
  require_sites(num_sites);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_sites);
  if (static_cast<Eigen::Index>(index) >= dim) throw std::out_of_range("basis index out of range");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::product(const std::vector<double>& excited_populations) {
  const std::size_t n = excited_populations.size();
  require_sites(n);
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = excited_populations[i];
      w *= (b & site_mask(i, n)) ? p : 1.0 - p;
    }
    m(b, b) = w;
  }
  return DensityMatrix(std::move(m));
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

double DensityMatrix::population(std::size_t site) const {
  if (site >= num_sites_) throw std::out_of_range("site out of range");
  const std::size_t mask = site_mask(site, num_sites_);
  double p = 0.0;
  for (std::size_t b = 0; b < dimension(); ++b) {
    if (b & mask) p += matrix_(b, b).real();
  }
  return p;
}

cplx DensityMatrix::expectation(const SparseOperator& op) const {
  if (op.num_sites != num_sites_) throw std::invalid_argument("operator size mismatch");
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(op.matrix, k); it; ++it) {
      // Tr(A rho) = sum_{r,c} A(r,c) rho(c,r)
      acc += it.value() * matrix_(it.col(), it.row());
    }
  }
  return acc;
}

DensityMatrix::Check DensityMatrix::check(double herm_tol, double trace_tol, double pos_tol) const {
  Check c;
  c.hermitian = hermiticity_error() <= herm_tol;
  c.unit_trace = std::abs(trace() - 1.0) <= trace_tol;
  c.positive = min_eigenvalue() >= -pos_tol;
  return c;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("state size mismatch");
  const Eigen::MatrixXcd d = a.matrix() - b.matrix();
  const Eigen::MatrixXcd h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qtransport
