#include "qtransport/model.hpp"

#include <cmath>
#include <sstream>

namespace qtransport {

std::string to_string(Role role) {
  switch (role) {
    case Role::pump: return "p";
    case Role::extract: return "e";
    case Role::plain: break;
  }
  return "-";
}

Role parse_role(const std::string& text) {
  if (text == "p") return Role::pump;
  if (text == "e") return Role::extract;
  if (text == "-") return Role::plain;
  throw std::invalid_argument("unknown role '" + text + "' (expected p, e or -)");
}

BathSpec BathSpec::from_occupation(double n) {
  if (!(n >= 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("bath occupation must be finite and >= 0");
  }
  return BathSpec{n, std::nullopt};
}

BathSpec BathSpec::from_temperature(double omega_a, double kelvin) {
  return BathSpec{photon_number(omega_a, kelvin), kelvin};
}

BathSpec BathSpec::from_reduced_temperature(double tau) {
  return BathSpec{photon_number_reduced(tau), std::nullopt};
}

std::vector<Violation> validate_geometry(const NetworkSpec& spec) {
  std::vector<Violation> out;
  if (!(spec.omega_a > 0.0) || !std::isfinite(spec.omega_a)) {
    out.push_back({"omega_a must be positive and finite", {}});
  }
  if (!spec.dipole_direction.allFinite() ||
      std::abs(spec.dipole_direction.norm() - 1.0) > 1e-12) {
    out.push_back({"dipole not unit norm", {}});
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!spec.emitters[i].position.allFinite()) {
      out.push_back({"emitter " + std::to_string(i) + " has non-finite position", {i}});
    }
  }
  if (spec.omega_a > 0.0 && std::isfinite(spec.omega_a)) {
    const double r_min = spec.min_separation();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.size(); ++j) {
        const double d = (spec.emitters[j].position - spec.emitters[i].position).norm();
        if (!(d > r_min)) {
          std::ostringstream msg;
          msg << "pair (" << i << "," << j << ") below r_min";
          out.push_back({msg.str(), {i, j}});
        }
      }
    }
  }
  return out;
}

std::vector<Violation> validate_network(const NetworkSpec& spec) {
  auto out = validate_geometry(spec);
  std::vector<std::size_t> pumps, extracts;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.emitters[i].role == Role::pump) pumps.push_back(i);
    if (spec.emitters[i].role == Role::extract) extracts.push_back(i);
  }
  if (pumps.size() != 1) {
    out.push_back({"expected exactly one pump emitter, found " + std::to_string(pumps.size()), pumps});
  }
  if (extracts.size() != 1) {
    out.push_back({"expected exactly one extract emitter, found " + std::to_string(extracts.size()),
                   extracts});
  }
  return out;
}

void require_valid(const std::vector<Violation>& violations, const std::string& context) {
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << context << ":";
  for (const auto& v : violations) msg << " [" << v.message << "]";
  throw std::invalid_argument(msg.str());
}

DriveSites resolve_drive_sites(const NetworkSpec& spec) {
  require_valid(validate_network(spec), "network not runnable");
  DriveSites sites;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.emitters[i].role == Role::pump) sites.pump = i;
    if (spec.emitters[i].role == Role::extract) sites.extract = i;
  }
  return sites;
}

double photon_number_reduced(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (tau == 0.0) return 0.0;
  return 1.0 / std::expm1(1.0 / tau);
}

double photon_number(double omega_a, double kelvin) {
  if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be positive");
  if (!(kelvin >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (kelvin == 0.0) return 0.0;
  const double beta_hw = constants::hbar * omega_a / (constants::boltzmann * kelvin);
  return 1.0 / std::expm1(beta_hw);
}

double kelvin_from_reduced(double omega_a, double tau) {
  return tau * constants::hbar * omega_a / constants::boltzmann;
}

}  // namespace qtransport
