#include "qtransport/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

namespace qtransport::cli {

namespace {

const std::array<std::string, 5> slot_names{"p", "2", "3", "e", "5"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  unsigned long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(out);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string show(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : "nan";
}

std::string show(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + show(v[k]);
  return out;
}

std::string show(bool b) { return b ? "true" : "false"; }

std::string show(const std::optional<double>& v) { return v ? show(*v) : ""; }

TemperatureUnit parse_unit(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "tau") return TemperatureUnit::tau;
  if (v == "kelvin" || v == "K") return TemperatureUnit::kelvin;
  if (v == "n" || v == "occupation") return TemperatureUnit::occupation;
  throw ConfigError(key + ": expected tau, kelvin or occupation, got '" + text + "'");
}

std::string show(TemperatureUnit u) {
  switch (u) {
    case TemperatureUnit::tau: return "tau";
    case TemperatureUnit::kelvin: return "kelvin";
    case TemperatureUnit::occupation: return "occupation";
  }
  return "?";
}

GridKind parse_grid(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "log") return GridKind::log;
  if (v == "linear") return GridKind::linear;
  throw ConfigError(key + ": expected log or linear, got '" + text + "'");
}

std::string show(GridKind g) { return g == GridKind::log ? "log" : "linear"; }

Vec3 parse_dipole(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "x") return Vec3::UnitX();
  if (v == "y") return Vec3::UnitY();
  if (v == "z") return Vec3::UnitZ();
  const auto xs = parse_list(key, v);
  if (xs.size() != 3) throw ConfigError(key + ": expected x, y, z or three comma-separated components");
  return Vec3(xs[0], xs[1], xs[2]);
}

std::string show(const std::optional<Vec3>& d) {
  if (!d) return "";
  return show((*d)(0)) + "," + show((*d)(1)) + "," + show((*d)(2));
}

struct Entry {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class F>
Entry number(F field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_double(k, v); },
          [field](const RunConfig& c) { return show(c.*field); }};
}

template <class F>
Entry optional_number(F field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            if (trim(v).empty()) c.*field = std::nullopt;
            else c.*field = parse_double(k, v);
          },
          [field](const RunConfig& c) { return show(c.*field); }};
}

template <class F>
Entry count(F field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            c.*field = static_cast<std::remove_reference_t<decltype(c.*field)>>(parse_count(k, v));
          },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

Entry toggle(bool TermToggles::*field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) { c.terms.*field = parse_bool(k, v); },
          [field](const RunConfig& c) { return show(c.terms.*field); }};
}

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> table = [] {
    std::map<std::string, Entry> m;
    m["scenario.kind"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.kind = trim(v); },
                          [](const RunConfig& c) { return c.kind; }};
    m["scenario.coordinates"] = {
        [](RunConfig& c, const std::string&, const std::string& v) { c.coordinates = trim(v); },
        [](const RunConfig& c) { return c.coordinates; }};
    m["scenario.scale"] = number(&RunConfig::scale);
    m["scenario.radius"] = optional_number(&RunConfig::radius);
    m["scenario.omega_a"] = optional_number(&RunConfig::omega_a);
    m["scenario.gamma_in"] = optional_number(&RunConfig::gamma_in);
    m["scenario.gamma_out"] = optional_number(&RunConfig::gamma_out);
    m["scenario.dipole"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              if (trim(v).empty()) c.dipole = std::nullopt;
                              else c.dipole = parse_dipole(k, v);
                            },
                            [](const RunConfig& c) { return show(c.dipole); }};
    for (std::size_t s = 0; s < 5; ++s) {
      m["scenario.offset_" + slot_names[s]] = {
          [s](RunConfig& c, const std::string& k, const std::string& v) {
            if (trim(v).empty()) c.offsets[s] = std::nullopt;
            else c.offsets[s] = parse_double(k, v);
          },
          [s](const RunConfig& c) { return show(c.offsets[s]); }};
    }
    m["terms.coherent"] = toggle(&TermToggles::coherent);
    m["terms.local"] = toggle(&TermToggles::local);
    m["terms.nonlocal"] = toggle(&TermToggles::nonlocal);
    m["terms.pump"] = toggle(&TermToggles::pump);
    m["terms.sink"] = toggle(&TermToggles::sink);
    m["terms.atomic_frequency"] = number(&RunConfig::atomic_frequency);
    m["bath.unit"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.bath_unit = parse_unit(k, v); },
                      [](const RunConfig& c) { return show(c.bath_unit); }};
    m["bath.value"] = number(&RunConfig::bath_value);
    m["bath.local_occupations"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) { c.local_occupations = parse_list(k, v); },
        [](const RunConfig& c) { return show(c.local_occupations); }};
    m["bath.nonlocal_occupation"] = optional_number(&RunConfig::nonlocal_occupation);
    m["sweep.unit"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_unit = parse_unit(k, v); },
                       [](const RunConfig& c) { return show(c.sweep_unit); }};
    m["sweep.min"] = number(&RunConfig::sweep_min);
    m["sweep.max"] = number(&RunConfig::sweep_max);
    m["sweep.points"] = count(&RunConfig::sweep_points);
    m["sweep.grid"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_grid = parse_grid(k, v); },
                       [](const RunConfig& c) { return show(c.sweep_grid); }};
    m["angle.slot"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.angle_slot = trim(v); },
                       [](const RunConfig& c) { return c.angle_slot; }};
    m["angle.min"] = number(&RunConfig::theta_min);
    m["angle.max"] = number(&RunConfig::theta_max);
    m["angle.points"] = count(&RunConfig::theta_points);
    m["dynamics.t_min"] = number(&RunConfig::t_min);
    m["dynamics.t_max"] = number(&RunConfig::t_max);
    m["dynamics.points"] = count(&RunConfig::t_points);
    m["dynamics.grid"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.t_grid = parse_grid(k, v); },
                          [](const RunConfig& c) { return show(c.t_grid); }};
    m["dynamics.method"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              const std::string t = trim(v);
                              if (t == "auto" || t == "automatic") c.method = Integrator::automatic;
                              else if (t == "explicit") c.method = Integrator::explicit_rk;
                              else if (t == "implicit") c.method = Integrator::implicit;
                              else throw ConfigError(k + ": expected auto, explicit or implicit, got '" + v + "'");
                            },
                            [](const RunConfig& c) {
                              return c.method == Integrator::automatic  ? std::string("auto")
                                     : c.method == Integrator::implicit ? std::string("implicit")
                                                                        : std::string("explicit");
                            }};
    m["dynamics.rtol"] = number(&RunConfig::rtol);
    m["dynamics.atol"] = number(&RunConfig::atol);
    m["dynamics.pair_fluxes"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) { c.pair_fluxes = parse_bool(k, v); },
        [](const RunConfig& c) { return show(c.pair_fluxes); }};
    m["solver.residual_tolerance"] = number(&RunConfig::residual_tolerance);
    m["solver.max_refinements"] = count(&RunConfig::max_refinements);
    m["toy.n_b"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.toy_n_b = parse_list(k, v); },
                    [](const RunConfig& c) { return show(c.toy_n_b); }};
    m["toy.gamma_nl"] = number(&RunConfig::toy_gamma_nl);
    m["toy.n_h_min"] = number(&RunConfig::toy_n_h_min);
    m["toy.n_h_max"] = number(&RunConfig::toy_n_h_max);
    m["toy.n_h_points"] = count(&RunConfig::toy_n_h_points);
    m["run.jobs"] = count(&RunConfig::jobs);
    m["run.out"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.out = trim(v); },
                    [](const RunConfig& c) { return c.out; }};
    return m;
  }();
  return table;
}

const Entry& lookup(const std::string& key) {
  const auto& r = registry();
  const auto it = r.find(key);
  if (it == r.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

double to_tau(TemperatureUnit unit, double value, double omega_a, const std::string& what) {
  switch (unit) {
    case TemperatureUnit::tau:
      if (!(value >= 0.0)) throw ConfigError(what + ": reduced temperature must be >= 0");
      return value;
    case TemperatureUnit::kelvin:
      if (!(value >= 0.0)) throw ConfigError(what + ": temperature must be >= 0 K");
      return value * constants::boltzmann / (constants::hbar * omega_a);
    case TemperatureUnit::occupation:
      if (!(value >= 0.0)) throw ConfigError(what + ": occupation must be >= 0");
      return value == 0.0 ? 0.0 : 1.0 / std::log1p(1.0 / value);
  }
  return value;
}

}  // namespace

SteadyStateOptions RunConfig::steady_options() const {
  SteadyStateOptions o;
  o.residual_tolerance = residual_tolerance;
  o.max_refinements = max_refinements;
  return o;
}

EvolveOptions RunConfig::evolve_options() const {
  EvolveOptions o;
  o.method = method;
  o.rtol = rtol;
  o.atol = atol;
  return o;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, e] : registry()) keys.push_back(k);
  return keys;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  lookup(key).set(config, key, value);
}

std::string get_value(const RunConfig& config, const std::string& key) { return lookup(key).get(config); }

void apply_assignment(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  set_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void apply_file(RunConfig& config, const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config: " + std::string(e.what()));
  }
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(path + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) set_value(config, section + "." + key, value.data());
  }
}

std::string to_ini(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, entry] : registry()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << entry.get(config) << '\n';
  }
  return out.str();
}

bool is_ring(const RunConfig& config) { return config.kind != "file"; }

void validate(const RunConfig& c) {
  if (is_ring(c)) {
    try {
      (void)parse_ring_kind(c.kind);
    } catch (const std::invalid_argument&) {
      throw ConfigError("scenario.kind: expected RP, CH, NH or file, got '" + c.kind + "'");
    }
  } else {
    if (c.coordinates.empty()) throw ConfigError("scenario.kind = file needs scenario.coordinates");
    if (!std::filesystem::exists(c.coordinates)) {
      throw ConfigError("coordinate file not found: " + c.coordinates);
    }
  }
  if (!(c.scale > 0.0)) throw ConfigError("scenario.scale must be positive");
  if (c.radius && !(*c.radius > 0.0)) throw ConfigError("scenario.radius must be positive");
  if (c.omega_a && !(*c.omega_a > 0.0)) throw ConfigError("scenario.omega_a must be positive");
  if (c.gamma_in && !(*c.gamma_in >= 0.0)) throw ConfigError("scenario.gamma_in must be >= 0");
  if (c.gamma_out && !(*c.gamma_out >= 0.0)) throw ConfigError("scenario.gamma_out must be >= 0");
  if (c.dipole && !(std::abs(c.dipole->norm() - 1.0) <= 1e-12)) {
    throw ConfigError("scenario.dipole must be a unit vector");
  }
  if (!(c.residual_tolerance > 0.0)) throw ConfigError("solver.residual_tolerance must be positive");
  if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw ConfigError("dynamics.rtol and dynamics.atol must be positive");
  if (!(c.bath_value >= 0.0)) throw ConfigError("bath.value must be >= 0");
  for (double n : c.local_occupations) {
    if (!(n >= 0.0)) throw ConfigError("bath.local_occupations must be >= 0");
  }
  if (c.nonlocal_occupation && !(*c.nonlocal_occupation >= 0.0)) {
    throw ConfigError("bath.nonlocal_occupation must be >= 0");
  }
  if (c.sweep_points == 0) throw ConfigError("sweep.points must be >= 1");
  if (c.sweep_points > 1 && !(c.sweep_max > c.sweep_min)) throw ConfigError("sweep.max must exceed sweep.min");
  if (c.sweep_grid == GridKind::log && !(c.sweep_min > 0.0)) throw ConfigError("log sweep needs sweep.min > 0");
  if (c.theta_points == 0) throw ConfigError("angle.points must be >= 1");
  if (c.theta_points > 1 && !(c.theta_max > c.theta_min)) throw ConfigError("angle.max must exceed angle.min");
  if (c.t_points < 2) throw ConfigError("dynamics.points must be >= 2");
  if (!(c.t_min > 0.0) || !(c.t_max > c.t_min)) throw ConfigError("dynamics needs 0 < t_min < t_max");
  if (c.toy_n_b.empty()) throw ConfigError("toy.n_b needs at least one value");
  if (!(c.toy_gamma_nl >= 0.0 && c.toy_gamma_nl < 1.0)) throw ConfigError("toy.gamma_nl must lie in [0, 1)");
  if (!(c.toy_n_h_min > 0.0) || !(c.toy_n_h_max > c.toy_n_h_min) || c.toy_n_h_points < 2) {
    throw ConfigError("toy grid needs 0 < n_h_min < n_h_max and >= 2 points");
  }
  if (c.jobs == 0) throw ConfigError("run.jobs must be >= 1");
}

RingScenario ring_scenario(const RunConfig& c) {
  RingScenario r = ring_preset(parse_ring_kind(c.kind));
  if (c.radius) r.radius = *c.radius;
  if (c.omega_a) r.omega_a = *c.omega_a;
  if (c.gamma_in) r.drive.gamma_in = *c.gamma_in;
  if (c.gamma_out) r.drive.gamma_out = *c.gamma_out;
  for (std::size_t s = 0; s < 5; ++s) {
    if (c.offsets[s]) r.angular_offsets[r.slot(slot_names[s])] = *c.offsets[s];
  }
  return r;
}

Scenario build_scenario(const RunConfig& c) {
  Scenario s;
  if (is_ring(c)) {
    s = ring_scenario(c).scenario(c.kind);
    if (c.dipole) s.network.dipole_direction = *c.dipole;
  } else {
    ImportedScenario imp;
    imp.path = c.coordinates;
    imp.scale = c.scale;
    if (c.omega_a) imp.omega_a = *c.omega_a;
    if (c.gamma_in) imp.drive.gamma_in = *c.gamma_in;
    if (c.gamma_out) imp.drive.gamma_out = *c.gamma_out;
    if (c.dipole) imp.dipole = *c.dipole;
    s = imp.scenario(std::filesystem::path(c.coordinates).stem().string());
  }
  s.options.terms = c.terms;
  s.options.atomic_frequency = c.atomic_frequency;
  if (!c.local_occupations.empty()) {
    if (c.local_occupations.size() != s.network.size()) {
      throw ConfigError("bath.local_occupations needs one value per site (" +
                        std::to_string(s.network.size()) + ")");
    }
    s.options.occupations = OccupationOverride{c.local_occupations, c.nonlocal_occupation.value_or(0.0)};
  } else if (c.nonlocal_occupation) {
    throw ConfigError("bath.nonlocal_occupation needs bath.local_occupations");
  }
  return s;
}

BathSpec bath(const RunConfig& c, double omega_a) {
  switch (c.bath_unit) {
    case TemperatureUnit::kelvin:
      if (!(c.bath_value >= 0.0)) throw ConfigError("bath.value: temperature must be >= 0 K");
      return BathSpec::from_temperature(omega_a, c.bath_value);
    case TemperatureUnit::occupation:
      if (!(c.bath_value >= 0.0)) throw ConfigError("bath.value: occupation must be >= 0");
      return BathSpec::from_occupation(c.bath_value);
    case TemperatureUnit::tau:
      break;
  }
  return BathSpec::from_reduced_temperature(to_tau(c.bath_unit, c.bath_value, omega_a, "bath.value"));
}

std::vector<double> sweep_taus(const RunConfig& c, double omega_a) {
  const double lo = to_tau(c.sweep_unit, c.sweep_min, omega_a, "sweep.min");
  const double hi = to_tau(c.sweep_unit, c.sweep_max, omega_a, "sweep.max");
  if (c.sweep_points == 1) return {lo};
  if (c.sweep_grid == GridKind::log) {
    if (!(lo > 0.0)) throw ConfigError("log sweep needs a positive lower end");
    return log_grid(lo, hi, c.sweep_points);
  }
  return linear_grid(lo, hi, c.sweep_points);
}

std::vector<double> time_grid(const RunConfig& c) {
  return c.t_grid == GridKind::log ? log_time_grid(c.t_min, c.t_max, c.t_points)
                                   : linear_grid(c.t_min, c.t_max, c.t_points);
}

}  // namespace qtransport::cli
