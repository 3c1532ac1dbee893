#pragma once

#include "qtransport/hilbert.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace qtransport {

/// Which generator terms are switched on.
struct TermToggles {
  bool coherent = true;  // -i[H, .]
  bool local = true;     // independent thermal damping of every emitter
  bool nonlocal = true;  // field-mediated cross damping (gamma_ij)
  bool pump = true;
  bool sink = true;

  static TermToggles none() { return {false, false, false, false, false}; }
  bool operator==(const TermToggles&) const = default;
};

/// Replaces the single shared bath occupation: one occupation per emitter
/// for the local term, and one occupation used by every non-local pair term.
struct OccupationOverride {
  std::vector<double> local;
  double nonlocal = 0.0;
};

struct AssemblyOptions {
  TermToggles terms;
  std::optional<OccupationOverride> occupations;
  /// omega_a / gamma0 kept in the coherent part. The atomic Hamiltonian
  /// commutes with every other term and every dissipator is covariant
  /// under it, so the default 0 (frame rotating at omega_a) leaves all
  /// populations and pair coherences unchanged.
  double atomic_frequency = 0.0;
};

/// Generator acting on column-stacked density matrices:
/// vec(rho)[r + D c] = rho(r, c), and A rho B maps to (B^T kron A) vec(rho).
struct SparseSuperoperator {
  std::size_t num_sites = 0;
  SparseMatrixC matrix;
  TermToggles terms = TermToggles::none();

  std::size_t hilbert_dimension() const { return std::size_t{1} << num_sites; }
  std::size_t dimension() const { return hilbert_dimension() * hilbert_dimension(); }
};

SparseSuperoperator operator+(const SparseSuperoperator& a, const SparseSuperoperator& b);

/// rate * (A rho B^dagger - 1/2 {B^dagger A, rho})
SparseSuperoperator lindblad_term(const SparseOperator& a, const SparseOperator& b, double rate);

/// -i [H, rho]
SparseSuperoperator commutator_term(const SparseOperator& h);

SparseSuperoperator zero_superoperator(std::size_t num_sites);

/// Full generator: coherent part, local and non-local thermal dissipators,
/// pump on sites.pump and sink on sites.extract. Drive sites are only
/// consulted when the corresponding rate is nonzero and the term enabled.
SparseSuperoperator assemble(const CouplingTable& table, const DriveSpec& drive,
                             const DriveSites& sites, const AssemblyOptions& options = {});

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v);

/// L applied to rho, returned as a matrix.
Eigen::MatrixXcd apply(const SparseSuperoperator& l, const Eigen::MatrixXcd& rho);

/// Largest |<vec(1)| L| entry; zero for a trace-preserving generator.
double trace_annihilation_error(const SparseSuperoperator& l);

/// A subset of vectorized entries closed under the generator. The balanced
/// sector holds the entries whose ket and bra carry the same number of
/// excitations. Every term of the generator maps this block into itself,
/// and stationary states as well as trajectories started from diagonal
/// states live entirely inside it.
struct Subspace {
  std::size_t num_sites = 0;
  std::vector<Eigen::Index> members;   // sector position -> full vec index
  std::vector<Eigen::Index> position;  // full vec index -> sector position, or -1

  Eigen::Index size() const { return static_cast<Eigen::Index>(members.size()); }
};

Subspace balanced_sector(std::size_t num_sites);
/// Every vectorized entry, for states that leave the balanced block.
Subspace full_space(std::size_t num_sites);

/// Restriction of L to the sector (rows and columns).
SparseMatrixC restrict_to(const SparseMatrixC& l, const Subspace& sector);

Eigen::VectorXcd gather(const Eigen::VectorXcd& full, const Subspace& sector);
Eigen::VectorXcd scatter(const Eigen::VectorXcd& reduced, const Subspace& sector);

/// True if every vectorized entry outside the sector is below tol.
bool inside_sector(const Eigen::MatrixXcd& rho, const Subspace& sector, double tol = 0.0);

/// Coordinate dump "row,col,re,im" of every stored nonzero.
void write_pattern_csv(std::ostream& out, const SparseSuperoperator& l);

}  // namespace qtransport
