#include "qtransport/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace qtransport::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_coupling_csv(std::ostream& out, const CouplingTable& table) {
  out << "i,j,x_tilde,gamma_over_gamma0,lambda_over_gamma0\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table.size(); ++j) {
      out << i << ',' << j << ',' << format_number(table.x_tilde(i, j)) << ','
          << format_number(table.gamma(i, j)) << ',' << format_number(table.lambda(i, j)) << '\n';
    }
  }
}

json to_json(const PathFraction& path) {
  return {{"source", path.source}, {"dest", path.dest}, {"eta", path.eta}, {"nu", path.nu}};
}

json to_json(const FluxReport& r) {
  json j;
  j["units"] = {{"flux", "hbar*omega_a*gamma0"}, {"chi", "dimensionless"}};
  j["P"] = r.pumped;
  j["E"] = r.extracted;
  j["E0"] = r.baseline;
  j["chi_stat"] = r.chi;
  j["q_hop"] = matrix_json(r.q_hop);
  j["q_nl"] = matrix_json(r.q_nl);
  j["paths"] = json::array();
  for (const auto& p : r.paths) j["paths"].push_back(to_json(p));
  j["site_balance"] = json::array();
  for (const auto& b : r.balance) {
    j["site_balance"].push_back({{"local", b.local},
                                 {"pump", b.pump},
                                 {"sink", b.sink},
                                 {"nonlocal", b.nonlocal},
                                 {"hopping", b.hopping},
                                 {"rate", b.rate}});
  }
  j["energy_rate"] = r.energy_rate;
  j["balance_error"] = r.balance_error();
  return j;
}

json to_json(const CouplingTable& table) {
  return {{"occupation", table.occupation},
          {"gamma", matrix_json(table.gamma)},
          {"lambda", matrix_json(table.lambda)},
          {"x_tilde", matrix_json(table.x_tilde)}};
}

std::vector<std::string> path_columns(const std::vector<std::pair<SiteSubset, SiteSubset>>& paths) {
  std::vector<std::string> cols;
  for (const auto& [src, dst] : paths) {
    cols.push_back("eta_" + src.name + "_" + dst.name);
    cols.push_back("nu_" + src.name + "_" + dst.name);
  }
  return cols;
}

void write_sweep_header(std::ostream& out, const std::vector<std::pair<SiteSubset, SiteSubset>>& paths,
                        bool angle_sweep) {
  out << (angle_sweep ? "theta_p_rad,tau" : "tau") << ",n,P_hw_g0,E_hw_g0,E0_hw_g0,chi";
  for (const auto& c : path_columns(paths)) out << ',' << c;
  out << ",residual,status\n";
}

void write_sweep_row(std::ostream& out, const SweepPoint& p,
                     const std::vector<std::pair<SiteSubset, SiteSubset>>& paths, bool angle_sweep) {
  out << format_number(p.parameter);
  if (angle_sweep) out << ',' << format_number(p.secondary);
  out << ',' << format_number(p.occupation);
  if (p.report) {
    const auto& r = *p.report;
    out << ',' << format_number(r.pumped) << ',' << format_number(r.extracted) << ','
        << format_number(r.baseline) << ',' << format_number(r.chi);
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const bool have = k < r.paths.size();
      out << ',' << format_number(have ? r.paths[k].eta : std::nan(""));
      out << ',' << format_number(have ? r.paths[k].nu : std::nan(""));
    }
    out << ',' << format_number(p.residual) << ",ok\n";
  } else {
    for (std::size_t k = 0; k < 4 + 2 * paths.size(); ++k) out << ",nan";
    out << ',' << format_number(p.residual) << ',' << csv_field("error: " + p.error) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     const std::vector<std::pair<SiteSubset, SiteSubset>>& paths, bool angle_sweep) {
  write_sweep_header(out, paths, angle_sweep);
  for (const auto& p : points) write_sweep_row(out, p, paths, angle_sweep);
}

void write_trajectory_csv(std::ostream& out, const DynamicsResult& r, bool pair_fluxes) {
  const std::size_t n = r.table.size();
  out << "t_g0inv,chi_t,chi_cumulative,P_hw_g0,E_hw_g0,E0_hw_g0,U_P_hw,U_E_hw,U_E0_hw";
  if (pair_fluxes) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out << ",q_hop_" << i << '_' << j;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out << ",q_nl_" << i << '_' << j;
  }
  out << '\n';
  for (std::size_t k = 0; k < r.pumped.times.size(); ++k) {
    out << format_number(r.pumped.times[k]) << ',' << format_number(r.chi_flux[k]) << ','
        << format_number(r.chi_cumulative[k]) << ',' << format_number(r.pump_rate[k]) << ','
        << format_number(r.extraction_rate[k]) << ',' << format_number(r.baseline_rate[k]) << ','
        << format_number(r.pumped.pumped[k]) << ',' << format_number(r.pumped.extracted[k]) << ','
        << format_number(r.baseline.extracted[k]);
    if (pair_fluxes) {
      const auto& rho = r.pumped.states[k];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out << ',' << format_number(hop_flux(rho, r.table, i, j));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out << ',' << format_number(nonlocal_flux(rho, r.table, i, j));
    }
    out << '\n';
  }
}

void write_toy_csv(std::ostream& out, const std::vector<ToyRow>& rows) {
  out << "n_B,n_h,c_closed_form,c_numeric,abs_error,is_max\n";
  for (const auto& r : rows) {
    out << format_number(r.n_b) << ',' << format_number(r.n_h) << ',' << format_number(r.closed_form)
        << ',' << format_number(r.numeric) << ',' << format_number(std::abs(r.closed_form - r.numeric))
        << ',' << (r.is_max ? 1 : 0) << '\n';
  }
}

}  // namespace qtransport::io
