#include "qtransport/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qtransport {

namespace {

void require_pair(const DensityMatrix& rho, std::size_t i, std::size_t j) {
  const std::size_t n = rho.num_sites();
  if (i >= n || j >= n) throw std::out_of_range("pair index out of range");
  if (i == j) throw std::invalid_argument("pair flux needs two distinct emitters");
}

}  // namespace

double pump_flux(const DensityMatrix& rho, const DriveSpec& drive, const DriveSites& sites) {
  if (drive.gamma_in == 0.0) return 0.0;
  return drive.gamma_in * (1.0 - rho.population(sites.pump));
}

double extraction_flux(const DensityMatrix& rho, const DriveSpec& drive, const DriveSites& sites) {
  if (drive.gamma_out == 0.0) return 0.0;
  return drive.gamma_out * rho.population(sites.extract);
}

Eigen::Matrix4cd reduced_pair_state(const DensityMatrix& rho, std::size_t i, std::size_t j) {
  require_pair(rho, i, j);
  const std::size_t n = rho.num_sites();
  const std::size_t mi = site_mask(i, n), mj = site_mask(j, n);
  const auto& m = rho.matrix();
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (std::size_t rest = 0; rest < rho.dimension(); ++rest) {
    if (rest & (mi | mj)) continue;
    for (int a = 0; a < 4; ++a) {
      const std::size_t r = rest | ((a & 2) ? mi : 0) | ((a & 1) ? mj : 0);
      for (int b = 0; b < 4; ++b) {
        const std::size_t c = rest | ((b & 2) ? mi : 0) | ((b & 1) ? mj : 0);
        out(a, b) += m(r, c);
      }
    }
  }
  return out;
}

cplx pair_coherence(const DensityMatrix& rho, std::size_t i, std::size_t j) {
  require_pair(rho, i, j);
  const std::size_t n = rho.num_sites();
  const std::size_t mi = site_mask(i, n), mj = site_mask(j, n);
  const auto& m = rho.matrix();
  cplx c = 0.0;
  for (std::size_t b = 0; b < rho.dimension(); ++b) {
    if (!(b & mi) && (b & mj)) c += m(b, (b | mi) & ~mj);
  }
  return c;
}

double hop_flux(const DensityMatrix& rho, const CouplingTable& table, std::size_t i, std::size_t j) {
  require_pair(rho, i, j);
  const double lam = table.lambda(i, j);
  if (lam == 0.0) return 0.0;
  return -2.0 * lam * pair_coherence(rho, i, j).imag();
}

double nonlocal_flux(const DensityMatrix& rho, const CouplingTable& table, std::size_t i, std::size_t j) {
  require_pair(rho, i, j);
  const double g = table.gamma(i, j);
  if (g == 0.0) return 0.0;
  return -g * pair_coherence(rho, i, j).real();
}

double site_energy_rate(const SparseSuperoperator& term, const DensityMatrix& rho, std::size_t site) {
  if (term.num_sites != rho.num_sites()) throw std::invalid_argument("state size mismatch");
  if (site >= rho.num_sites()) throw std::out_of_range("site out of range");
  const Eigen::MatrixXcd d = apply(term, rho.matrix());
  const std::size_t mask = site_mask(site, rho.num_sites());
  double acc = 0.0;
  for (Eigen::Index b = 0; b < d.rows(); ++b) {
    if (static_cast<std::size_t>(b) & mask) acc += d(b, b).real();
  }
  return acc;
}

double energy_rate(const SparseSuperoperator& l, const DensityMatrix& rho) {
  if (l.num_sites != rho.num_sites()) throw std::invalid_argument("state size mismatch");
  const Eigen::MatrixXcd d = apply(l, rho.matrix());
  double acc = 0.0;
  for (Eigen::Index b = 0; b < d.rows(); ++b) acc += std::popcount(static_cast<std::size_t>(b)) * d(b, b).real();
  return acc;
}

double efficiency(double pumped, double extracted, double baseline) {
  if (pumped == 0.0) throw std::domain_error("efficiency undefined: no pumped energy");
  return (extracted - baseline) / pumped;
}

PathFraction path_fractions(const DensityMatrix& pumped, const DensityMatrix& unpumped,
                            const CouplingTable& table, const DriveSpec& drive_pumped,
                            const DriveSpec& drive_unpumped, const DriveSites& sites,
                            const SiteSubset& source, const SiteSubset& dest) {
  if (drive_pumped.gamma_in == drive_unpumped.gamma_in) {
    throw std::invalid_argument("path fractions need two states with different pump rates");
  }
  const double p = pump_flux(pumped, drive_pumped, sites) - pump_flux(unpumped, drive_unpumped, sites);
  if (p == 0.0) throw std::domain_error("path fractions undefined: no pumped energy");
  PathFraction out{source.name, dest.name, 0.0, 0.0};
  for (auto k : source.sites) {
    for (auto a : dest.sites) {
      if (k == a) continue;
      out.eta += hop_flux(pumped, table, k, a) - hop_flux(unpumped, table, k, a);
      out.nu += nonlocal_flux(pumped, table, k, a) - nonlocal_flux(unpumped, table, k, a);
    }
  }
  out.eta /= p;
  out.nu /= p;
  return out;
}

double FluxReport::balance_error() const {
  double e = 0.0;
  for (const auto& b : balance) e = std::max(e, std::abs(b.channel_sum() - b.rate));
  return e;
}

double FluxReport::stationarity_error() const {
  double e = 0.0;
  for (const auto& b : balance) e = std::max(e, std::abs(b.channel_sum()));
  return e;
}

FluxReport flux_report(const DensityMatrix& rho, const DensityMatrix& baseline,
                       const SparseSuperoperator& l, const CouplingTable& table,
                       const DriveSpec& drive, const DriveSites& sites,
                       const std::vector<std::pair<SiteSubset, SiteSubset>>& paths,
                       const AssemblyOptions& options) {
  const std::size_t n = table.size();
  if (rho.num_sites() != n || baseline.num_sites() != n) throw std::invalid_argument("state size mismatch");
  const TermToggles& terms = options.terms;
  FluxReport r;
  r.pumped = terms.pump ? pump_flux(rho, drive, sites) : 0.0;
  r.extracted = terms.sink ? extraction_flux(rho, drive, sites) : 0.0;
  r.baseline = terms.sink ? extraction_flux(baseline, drive, sites) : 0.0;
  r.chi = r.pumped > 0.0 ? efficiency(r.pumped, r.extracted, r.baseline)
                         : std::numeric_limits<double>::quiet_NaN();

  r.q_hop = Eigen::MatrixXd::Zero(n, n);
  r.q_nl = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx c = pair_coherence(rho, i, j);
      if (terms.coherent) {
        r.q_hop(i, j) = -2.0 * table.lambda(i, j) * c.imag();
        r.q_hop(j, i) = -r.q_hop(i, j);
      }
      if (terms.nonlocal) r.q_nl(i, j) = r.q_nl(j, i) = -table.gamma(i, j) * c.real();
    }
  }

  const DriveSpec off{0.0, drive.gamma_out};
  if (r.pumped > 0.0) {
    for (const auto& [src, dst] : paths) {
      r.paths.push_back(path_fractions(rho, baseline, table, drive, off, sites, src, dst));
    }
  }

  const Eigen::MatrixXcd d = apply(l, rho.matrix());
  for (std::size_t j = 0; j < n; ++j) {
    SiteBalance b;
    const double p = rho.population(j);
    if (terms.local) {
      const double nj = options.occupations ? options.occupations->local[j] : table.occupation;
      b.local = nj * (1.0 - p) - (1.0 + nj) * p;
    }
    if (terms.pump && j == sites.pump && drive.gamma_in > 0.0) b.pump = drive.gamma_in * (1.0 - p);
    if (terms.sink && j == sites.extract && drive.gamma_out > 0.0) b.sink = -drive.gamma_out * p;
    b.nonlocal = r.q_nl.col(j).sum();
    b.hopping = r.q_hop.col(j).sum();
    const std::size_t mj = site_mask(j, n);
    for (Eigen::Index k = 0; k < d.rows(); ++k) {
      if (static_cast<std::size_t>(k) & mj) b.rate += d(k, k).real();
    }
    r.balance.push_back(b);
  }
  for (Eigen::Index k = 0; k < d.rows(); ++k) {
    r.energy_rate += std::popcount(static_cast<std::size_t>(k)) * d(k, k).real();
  }
  return r;
}

}  // namespace qtransport
