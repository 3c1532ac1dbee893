#include "qtransport/scenarios.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qtransport {

namespace {
constexpr double pi = boost::math::constants::pi<double>();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

RingKind parse_ring_kind(const std::string& text) {
  if (text == "RP" || text == "rp") return RingKind::RP;
  if (text == "CH" || text == "ch") return RingKind::CH;
  if (text == "NH" || text == "nh") return RingKind::NH;
  throw std::invalid_argument("unknown ring scenario '" + text + "' (expected RP, CH or NH)");
}

std::string to_string(RingKind kind) {
  switch (kind) {
    case RingKind::RP: return "RP";
    case RingKind::CH: return "CH";
    case RingKind::NH: return "NH";
  }
  return "?";
}

std::size_t RingScenario::slot(const std::string& name) const {
  for (std::size_t k = 0; k < site_order.size(); ++k) {
    if (site_order[k] == name) return k;
  }
  throw std::invalid_argument("ring has no slot named '" + name + "'");
}

NetworkSpec RingScenario::network() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ring radius must be positive");
  NetworkSpec spec;
  spec.omega_a = omega_a;
  spec.dipole_direction = Vec3::UnitZ();
  for (std::size_t k = 0; k < 5; ++k) {
    if (!std::isfinite(angular_offsets[k])) throw std::invalid_argument("ring offsets must be finite");
    const double phi = 2.0 * pi * double(k) / 5.0 + angular_offsets[k];
    EmitterSpec e;
    e.position = Vec3(radius * std::cos(phi), radius * std::sin(phi), 0.0);
    e.label = static_cast<int>(k) + 1;
    e.role = site_order[k] == "p" ? Role::pump : site_order[k] == "e" ? Role::extract : Role::plain;
    spec.emitters.push_back(e);
  }
  return spec;
}

Scenario RingScenario::scenario(const std::string& name) const {
  Scenario s;
  s.name = name;
  s.network = network();
  s.drive = drive;
  s.paths = {
      {SiteSubset{"p2", {slot("p"), slot("2")}}, SiteSubset{"35", {slot("3"), slot("5")}}},
      {SiteSubset{"35", {slot("3"), slot("5")}}, SiteSubset{"e", {slot("e")}}},
  };
  return s;
}

RingScenario ring_preset(RingKind kind) {
  RingScenario r;
  if (kind == RingKind::CH || kind == RingKind::NH) r.angular_offsets[r.slot("2")] = -preset_displacement;
  if (kind == RingKind::NH) r.angular_offsets[r.slot("p")] = preset_displacement;
  return r;
}

NetworkSpec make_ring(RingKind kind) { return ring_preset(kind).network(); }

CoordinateParseError::CoordinateParseError(const std::string& path, std::size_t line,
                                           const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + message), line_(line) {}

NetworkSpec load_coordinates(const std::string& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale factor must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coordinate file " + path);
  NetworkSpec spec;
  std::string text;
  std::size_t line = 0, pumps = 0, sinks = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    std::istringstream fields(text);
    EmitterSpec e;
    std::string role, extra;
    double x, y, z;
    if (!(fields >> e.label)) throw CoordinateParseError(path, line, "expected integer site label");
    if (!(fields >> x >> y >> z)) throw CoordinateParseError(path, line, "expected three coordinates");
    if (!(fields >> role)) throw CoordinateParseError(path, line, "missing role (p, e or -)");
    if (fields >> extra) throw CoordinateParseError(path, line, "unexpected trailing field '" + extra + "'");
    try {
      e.role = parse_role(role);
    } catch (const std::invalid_argument& err) {
      throw CoordinateParseError(path, line, err.what());
    }
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw CoordinateParseError(path, line, "coordinates must be finite");
    }
    pumps += e.role == Role::pump;
    sinks += e.role == Role::extract;
    e.position = scale * Vec3(x, y, z);
    spec.emitters.push_back(e);
  }
  if (spec.emitters.empty()) throw CoordinateParseError(path, line, "no sites in coordinate file");
  if (spec.emitters.size() < 2) throw CoordinateParseError(path, line, "need at least two sites");
  if (pumps != 1) throw CoordinateParseError(path, line, "need exactly one pump site (role p), found " + std::to_string(pumps));
  if (sinks != 1) throw CoordinateParseError(path, line, "need exactly one extraction site (role e), found " + std::to_string(sinks));
  return spec;
}

NetworkSpec ImportedScenario::network() const {
  NetworkSpec spec = load_coordinates(path, scale);
  spec.omega_a = omega_a;
  spec.dipole_direction = dipole;
  return spec;
}

Scenario ImportedScenario::scenario(const std::string& name) const {
  Scenario s;
  s.name = name;
  s.network = network();
  s.drive = drive;
  return s;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (points == 1 && lo > 0.0) return {lo};
  return log_time_grid(lo, hi, points);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw std::invalid_argument("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo + (hi - lo) * double(k) / double(points - 1);
  g.back() = hi;
  return g;
}

std::vector<double> default_tau_grid() { return log_grid(0.05, 5.0, 40); }

StationaryPoint solve_stationary(const Scenario& scenario, const BathSpec& bath,
                                 const SteadyStateOptions& options) {
  require_valid(validate_network(scenario.network), scenario.name);
  const DriveSites sites = resolve_drive_sites(scenario.network);
  CouplingTable table = build_coupling_table(scenario.network, bath);
  const auto l = assemble(table, scenario.drive, sites, scenario.options);
  const DriveSpec off{0.0, scenario.drive.gamma_out};
  const auto l0 = assemble(table, off, sites, scenario.options);
  auto pumped = steady_state(l, options);
  auto baseline = steady_state(l0, options);
  FluxReport report = flux_report(pumped.rho, baseline.rho, l, table, scenario.drive, sites,
                                  scenario.paths, scenario.options);
  return {std::move(table), std::move(pumped), std::move(baseline), std::move(report)};
}

DynamicsResult solve_dynamics(const Scenario& scenario, const BathSpec& bath,
                              const std::vector<double>& t_grid, const EvolveOptions& options,
                              const std::optional<DensityMatrix>& initial) {
  require_valid(validate_network(scenario.network), scenario.name);
  const DriveSites sites = resolve_drive_sites(scenario.network);
  DynamicsResult out;
  out.table = build_coupling_table(scenario.network, bath);
  const DriveSpec off{0.0, scenario.drive.gamma_out};
  const auto l = assemble(out.table, scenario.drive, sites, scenario.options);
  const auto l0 = assemble(out.table, off, sites, scenario.options);
  const DriveSpec meter{scenario.options.terms.pump ? scenario.drive.gamma_in : 0.0,
                        scenario.options.terms.sink ? scenario.drive.gamma_out : 0.0};
  const DriveSpec meter0{0.0, meter.gamma_out};
  const DensityMatrix rho0 = initial ? *initial : DensityMatrix::ground(scenario.network.size());
  out.pumped = evolve(l, rho0, t_grid, {meter, sites}, options);
  out.baseline = evolve(l0, rho0, t_grid, {meter0, sites}, options);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double p = pump_flux(out.pumped.states[k], meter, sites);
    const double e = extraction_flux(out.pumped.states[k], meter, sites);
    const double e0 = extraction_flux(out.baseline.states[k], meter0, sites);
    out.pump_rate.push_back(p);
    out.extraction_rate.push_back(e);
    out.baseline_rate.push_back(e0);
    out.chi_flux.push_back(p > 0.0 ? efficiency(p, e, e0) : nan);
    const double up = out.pumped.pumped[k];
    out.chi_cumulative.push_back(
        up > 0.0 ? (out.pumped.extracted[k] - out.baseline.extracted[k]) / up : nan);
  }
  return out;
}

namespace {

SweepPoint run_point(const Scenario& scenario, double tau, const SteadyStateOptions& options) {
  SweepPoint pt;
  pt.parameter = tau;
  try {
    const BathSpec bath = BathSpec::from_reduced_temperature(tau);
    pt.occupation = bath.occupation;
    auto sp = solve_stationary(scenario, bath, options);
    pt.residual = std::max(sp.pumped.residual, sp.baseline.residual);
    pt.report = std::move(sp.report);
  } catch (const SolverError& e) {
    pt.error = e.what();
    pt.residual = e.residual();
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

std::vector<SweepPoint> sweep_temperature(const Scenario& scenario, const std::vector<double>& taus,
                                          const SteadyStateOptions& options, unsigned jobs) {
  return parallel_map<SweepPoint>(taus.size(), jobs, [&](std::size_t k) {
    return run_point(scenario, taus[k], options);
  });
}

std::vector<SweepPoint> sweep_angle(const RingScenario& ring, const std::string& slot_name,
                                    const std::vector<double>& thetas, const std::vector<double>& taus,
                                    const SteadyStateOptions& options, unsigned jobs) {
  const std::size_t slot = ring.slot(slot_name);
  return parallel_map<SweepPoint>(thetas.size() * taus.size(), jobs, [&](std::size_t k) {
    const double tau = taus[k / thetas.size()];
    const double theta = thetas[k % thetas.size()];
    SweepPoint pt;
    try {
      RingScenario r = ring;
      r.angular_offsets[slot] = theta;
      pt = run_point(r.scenario("angle"), tau, options);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    pt.parameter = theta;
    pt.secondary = tau;
    return pt;
  });
}

}  // namespace qtransport
