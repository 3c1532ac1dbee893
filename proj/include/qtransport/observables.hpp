#pragma once

#include "qtransport/liouvillian.hpp"

#include <string>
#include <vector>

/// Energy fluxes of a solved configuration. Every flux is in units of
/// hbar*omega_a*gamma0; only the atomic part H_a carries energy, because
/// the dipole-dipole terms are already folded into the per-pair channels.
namespace qtransport {

/// P = gamma_in <sigma_p^- sigma_p^+>: ground population of p times the pump rate.
double pump_flux(const DensityMatrix& rho, const DriveSpec& drive, const DriveSites& sites);

/// E = gamma_out <sigma_e^+ sigma_e^->.
double extraction_flux(const DensityMatrix& rho, const DriveSpec& drive, const DriveSites& sites);

/// Partial trace onto sites (i, j); basis index 2 a_i + b_j.
Eigen::Matrix4cd reduced_pair_state(const DensityMatrix& rho, std::size_t i, std::size_t j);

/// c^{ij} = <0_i 1_j| rho_ij |1_i 0_j> = <sigma_i^+ sigma_j^->.
cplx pair_coherence(const DensityMatrix& rho, std::size_t i, std::size_t j);

/// Coherent energy flux from i to j: -2 Lambda_ij Im c^{ij}.
double hop_flux(const DensityMatrix& rho, const CouplingTable& table, std::size_t i, std::size_t j);

/// Energy the field deposits on j through the (i, j) collective term: -gamma_ij Re c^{ij}.
double nonlocal_flux(const DensityMatrix& rho, const CouplingTable& table, std::size_t i, std::size_t j);

/// Tr(n_site T(rho)) for one generator term T; the direct route behind the
/// closed forms above.
double site_energy_rate(const SparseSuperoperator& term, const DensityMatrix& rho, std::size_t site);

/// Tr(H_a L(rho)).
double energy_rate(const SparseSuperoperator& l, const DensityMatrix& rho);

/// (E - E0) / P. Not clamped: values above 1 are physical.
double efficiency(double pumped, double extracted, double baseline);

struct SiteSubset {
  std::string name;
  std::vector<std::size_t> sites;
};

/// Fraction of pumped energy that moves from `source` to `dest`.
struct PathFraction {
  std::string source;
  std::string dest;
  double eta = 0.0;  // via hopping
  double nu = 0.0;   // via collective dissipation
};

/// eta/nu between two subsets from a pumped and an unpumped steady state of
/// the same configuration. The pump rates must differ.
PathFraction path_fractions(const DensityMatrix& pumped, const DensityMatrix& unpumped,
                            const CouplingTable& table, const DriveSpec& drive_pumped,
                            const DriveSpec& drive_unpumped, const DriveSites& sites,
                            const SiteSubset& source, const SiteSubset& dest);

/// Energy balance of one emitter: the channels add up to d<n_j>/dt.
struct SiteBalance {
  double local = 0.0;     // independent thermal exchange
  double pump = 0.0;
  double sink = 0.0;      // <= 0
  double nonlocal = 0.0;  // sum_i Q_nl(i, j)
  double hopping = 0.0;   // sum_i Q_hop(i -> j)
  double rate = 0.0;      // Tr(n_j L rho) from the assembled generator

  double channel_sum() const { return local + pump + sink + nonlocal + hopping; }
};

struct FluxReport {
  double pumped = 0.0;     // P
  double extracted = 0.0;  // E
  double baseline = 0.0;   // E0
  double chi = 0.0;
  Eigen::MatrixXd q_hop;   // q_hop(i, j): flux i -> j, antisymmetric
  Eigen::MatrixXd q_nl;    // symmetric
  std::vector<PathFraction> paths;
  std::vector<SiteBalance> balance;
  double energy_rate = 0.0;  // Tr(H_a L rho)

  /// max_j |channel_sum - rate|: closure of the channel decomposition.
  double balance_error() const;
  /// max_j |channel_sum|: zero at a stationary state.
  double stationarity_error() const;
};

/// Everything about one stationary point. `baseline` is the steady state of
/// the same generator with the pump switched off; `l` is the pumped generator.
FluxReport flux_report(const DensityMatrix& rho, const DensityMatrix& baseline,
                       const SparseSuperoperator& l, const CouplingTable& table,
                       const DriveSpec& drive, const DriveSites& sites,
                       const std::vector<std::pair<SiteSubset, SiteSubset>>& paths = {},
                       const AssemblyOptions& options = {});

}  // namespace qtransport
