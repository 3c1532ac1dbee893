#pragma once

#include "qtransport/scenarios.hpp"
#include "qtransport/toymodel.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

/// CSV and JSON writers. CSV numbers are printed with 17 significant
/// digits and columns come in a fixed order, so identical inputs give
/// byte-identical files. Column names carry their units:
///   *_hw_g0  energy flux in hbar*omega_a*gamma0
///   *_hw     energy in hbar*omega_a
///   *_g0     rate in gamma0
///   t_g0inv  time in 1/gamma0
namespace qtransport::io {

using nlohmann::json;

std::string format_number(double v);

/// i,j,x_tilde,gamma_over_gamma0,lambda_over_gamma0 for every ordered pair.
void write_coupling_csv(std::ostream& out, const CouplingTable& table);

json to_json(const FluxReport& report);
json to_json(const CouplingTable& table);
json to_json(const PathFraction& path);

/// Column names of the path aggregates of a report, e.g. eta_p2_35, nu_p2_35.
std::vector<std::string> path_columns(const std::vector<std::pair<SiteSubset, SiteSubset>>& paths);

/// One row per point: parameter columns ("tau", or "theta_p_rad,tau"), n,
/// P, E, E0, chi, path aggregates, residual, status. Failed points keep
/// their row with nan values and status "error: <message>".
void write_sweep_header(std::ostream& out, const std::vector<std::pair<SiteSubset, SiteSubset>>& paths,
                        bool angle_sweep);
void write_sweep_row(std::ostream& out, const SweepPoint& point,
                     const std::vector<std::pair<SiteSubset, SiteSubset>>& paths, bool angle_sweep);
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     const std::vector<std::pair<SiteSubset, SiteSubset>>& paths, bool angle_sweep);

/// One row per grid time. With pair_fluxes, q_hop_i_j / q_nl_i_j columns
/// (i < j) follow the scalar columns.
void write_trajectory_csv(std::ostream& out, const DynamicsResult& result, bool pair_fluxes);

struct ToyRow {
  double n_b = 0.0;
  double n_h = 0.0;
  double closed_form = 0.0;
  double numeric = 0.0;
  bool is_max = false;
};

void write_toy_csv(std::ostream& out, const std::vector<ToyRow>& rows);

}  // namespace qtransport::io
