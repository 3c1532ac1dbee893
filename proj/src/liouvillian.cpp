#include "qtransport/liouvillian.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qtransport {

namespace {

SparseMatrixC identity(std::size_t dim) {
  SparseMatrixC id(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  id.setIdentity();
  return id;
}

SparseMatrixC kron(const SparseMatrixC& a, const SparseMatrixC& b) {
  SparseMatrixC out = Eigen::kroneckerProduct(a, b);
  return out;
}

void require_site(std::size_t site, std::size_t n, const char* what) {
  if (site >= n) {
    throw std::out_of_range(std::string(what) + " site " + std::to_string(site) +
                            " out of range for " + std::to_string(n) + " emitters");
  }
}

}  // namespace

SparseSuperoperator operator+(const SparseSuperoperator& a, const SparseSuperoperator& b) {
  if (a.num_sites != b.num_sites) throw std::invalid_argument("superoperator size mismatch");
  SparseSuperoperator out{a.num_sites, SparseMatrixC(a.matrix + b.matrix), a.terms};
  out.terms.coherent |= b.terms.coherent;
  out.terms.local |= b.terms.local;
  out.terms.nonlocal |= b.terms.nonlocal;
  out.terms.pump |= b.terms.pump;
  out.terms.sink |= b.terms.sink;
  return out;
}

SparseSuperoperator zero_superoperator(std::size_t num_sites) {
  const auto dim = static_cast<Eigen::Index>((std::size_t{1} << num_sites) << num_sites);
  return {num_sites, SparseMatrixC(dim, dim), TermToggles::none()};
}

SparseSuperoperator lindblad_term(const SparseOperator& a, const SparseOperator& b, double rate) {
  if (a.num_sites != b.num_sites || a.matrix.rows() != b.matrix.rows()) {
    throw std::invalid_argument("lindblad_term: jump operator dimension mismatch");
  }
  auto out = zero_superoperator(a.num_sites);
  if (rate == 0.0) return out;
  const SparseMatrixC id = identity(a.dimension());
  const SparseMatrixC bdag_a = b.matrix.adjoint() * a.matrix;
  const SparseMatrixC b_conj = b.matrix.conjugate();
  const SparseMatrixC bdag_a_t = bdag_a.transpose();
  out.matrix = kron(b_conj, a.matrix) - 0.5 * (kron(id, bdag_a) + kron(bdag_a_t, id));
  out.matrix *= cplx(rate);
  out.matrix.prune(cplx(0.0));
  return out;
}

SparseSuperoperator commutator_term(const SparseOperator& h) {
  const SparseMatrixC id = identity(h.dimension());
  const SparseMatrixC h_t = h.matrix.transpose();
  auto out = zero_superoperator(h.num_sites);
  out.matrix = cplx(0.0, -1.0) * (kron(id, h.matrix) - kron(h_t, id));
  out.matrix.prune(cplx(0.0));
  out.terms.coherent = true;
  return out;
}

SparseSuperoperator assemble(const CouplingTable& table, const DriveSpec& drive,
                             const DriveSites& sites, const AssemblyOptions& options) {
  const std::size_t n = table.size();
  if (n < 1 || n > max_sites) throw std::invalid_argument("unsupported register size");
  if (drive.gamma_in < 0.0 || drive.gamma_out < 0.0) {
    throw std::invalid_argument("drive rates must be >= 0");
  }
  const auto& terms = options.terms;
  std::vector<double> local_n(n, table.occupation);
  double nonlocal_n = table.occupation;
  if (options.occupations) {
    if (options.occupations->local.size() != n) {
      throw std::invalid_argument("per-site occupation vector has wrong length");
    }
    local_n = options.occupations->local;
    nonlocal_n = options.occupations->nonlocal;
  }
  for (double v : local_n) {
    if (!(v >= 0.0)) throw std::invalid_argument("occupations must be >= 0");
  }
  if (!(nonlocal_n >= 0.0)) throw std::invalid_argument("occupations must be >= 0");

  std::vector<SparseOperator> up, down;
  for (std::size_t i = 0; i < n; ++i) {
    up.push_back(ladder_op(i, Ladder::raise, n));
    down.push_back(ladder_op(i, Ladder::lower, n));
  }

  auto total = zero_superoperator(n);
  auto add = [&total](const SparseSuperoperator& s) { total.matrix += s.matrix; };

  if (terms.coherent) {
    SparseOperator h = interaction_hamiltonian(table);
    if (options.atomic_frequency != 0.0) {
      h.matrix += cplx(options.atomic_frequency) * atomic_hamiltonian(n).matrix;
    }
    add(commutator_term(h));
  }
  if (terms.local) {
    for (std::size_t i = 0; i < n; ++i) {
      add(lindblad_term(up[i], up[i], local_n[i]));
      add(lindblad_term(down[i], down[i], 1.0 + local_n[i]));
    }
  }
  if (terms.nonlocal) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double g = table.gamma(i, j);
        if (g == 0.0) continue;
        // pair term plus its Hermitian conjugate (i <-> j)
        add(lindblad_term(up[i], up[j], nonlocal_n * g));
        add(lindblad_term(up[j], up[i], nonlocal_n * g));
        add(lindblad_term(down[i], down[j], (1.0 + nonlocal_n) * g));
        add(lindblad_term(down[j], down[i], (1.0 + nonlocal_n) * g));
      }
    }
  }
  if (terms.pump && drive.gamma_in > 0.0) {
    require_site(sites.pump, n, "pump");
    add(lindblad_term(up[sites.pump], up[sites.pump], drive.gamma_in));
  }
  if (terms.sink && drive.gamma_out > 0.0) {
    require_site(sites.extract, n, "extract");
    add(lindblad_term(down[sites.extract], down[sites.extract], drive.gamma_out));
  }
  total.matrix.prune(cplx(0.0));
  total.matrix.makeCompressed();
  total.terms = terms;
  return total;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  // Eigen matrices are column-major, so the storage order is the column stack.
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v) {
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (dim * dim != v.size()) throw std::invalid_argument("vector length is not a square");
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

Eigen::MatrixXcd apply(const SparseSuperoperator& l, const Eigen::MatrixXcd& rho) {
  if (static_cast<std::size_t>(rho.size()) != l.dimension()) {
    throw std::invalid_argument("state does not match superoperator dimension");
  }
  const Eigen::VectorXcd out = l.matrix * vectorize(rho);
  return unvectorize(out);
}

double trace_annihilation_error(const SparseSuperoperator& l) {
  const auto d = static_cast<Eigen::Index>(l.hilbert_dimension());
  Eigen::RowVectorXcd functional = Eigen::RowVectorXcd::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) functional(i + d * i) = 1.0;
  const Eigen::RowVectorXcd image = functional * l.matrix;
  return image.size() ? image.cwiseAbs().maxCoeff() : 0.0;
}

Subspace balanced_sector(std::size_t num_sites) {
  if (num_sites < 1 || num_sites > max_sites) throw std::invalid_argument("unsupported register size");
  const std::size_t d = std::size_t{1} << num_sites;
  Subspace s;
  s.num_sites = num_sites;
  s.position.assign(d * d, -1);
  // Grouped by excitation number: the dissipators only couple neighbouring
  // groups, so the sector generator is block tridiagonal in this order.
  for (std::size_t k = 0; k <= num_sites; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      if (static_cast<std::size_t>(std::popcount(c)) != k) continue;
      for (std::size_t r = 0; r < d; ++r) {
        if (static_cast<std::size_t>(std::popcount(r)) != k) continue;
        const auto full = static_cast<Eigen::Index>(r + d * c);
        s.position[full] = static_cast<Eigen::Index>(s.members.size());
        s.members.push_back(full);
      }
    }
  }
  return s;
}

Subspace full_space(std::size_t num_sites) {
  if (num_sites < 1 || num_sites > max_sites) throw std::invalid_argument("unsupported register size");
  const std::size_t d2 = (std::size_t{1} << num_sites) << num_sites;
  Subspace s;
  s.num_sites = num_sites;
  s.members.resize(d2);
  s.position.resize(d2);
  for (std::size_t k = 0; k < d2; ++k) s.members[k] = s.position[k] = static_cast<Eigen::Index>(k);
  return s;
}

SparseMatrixC restrict_to(const SparseMatrixC& l, const Subspace& sector) {
  if (static_cast<std::size_t>(l.rows()) != sector.position.size()) {
    throw std::invalid_argument("sector does not match superoperator dimension");
  }
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(l.nonZeros()));
  for (Eigen::Index k = 0; k < l.outerSize(); ++k) {
    const Eigen::Index col = sector.position[k];
    if (col < 0) continue;
    for (SparseMatrixC::InnerIterator it(l, k); it; ++it) {
      const Eigen::Index row = sector.position[it.row()];
      if (row >= 0) t.emplace_back(row, col, it.value());
    }
  }
  SparseMatrixC out(sector.size(), sector.size());
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

Eigen::VectorXcd gather(const Eigen::VectorXcd& full, const Subspace& sector) {
  Eigen::VectorXcd out(sector.size());
  for (Eigen::Index k = 0; k < sector.size(); ++k) out(k) = full(sector.members[k]);
  return out;
}

Eigen::VectorXcd scatter(const Eigen::VectorXcd& reduced, const Subspace& sector) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector.position.size()));
  for (Eigen::Index k = 0; k < sector.size(); ++k) out(sector.members[k]) = reduced(k);
  return out;
}

bool inside_sector(const Eigen::MatrixXcd& rho, const Subspace& sector, double tol) {
  const Eigen::VectorXcd v = vectorize(rho);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (sector.position[k] < 0 && std::abs(v(k)) > tol) return false;
  }
  return true;
}

void write_pattern_csv(std::ostream& out, const SparseSuperoperator& l) {
  out << "row,col,re,im\n";
  char buf[128];
  for (Eigen::Index k = 0; k < l.matrix.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(l.matrix, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%td,%td,%.17g,%.17g\n", it.row(), it.col(),
                    it.value().real(), it.value().imag());
      out << buf;
    }
  }
}

}  // namespace qtransport
