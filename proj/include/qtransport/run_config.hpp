#pragma once

#include "qtransport/scenarios.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/// Run configuration for the batch front end. The on-disk form is INI text
/// with sections; every key is addressed as "section.key" both in files and
/// in command-line overrides. Defaults reproduce the ring and imported
/// network protocols without any file.
namespace qtransport::cli {

/// Bad key, unparsable value or inconsistent settings. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TemperatureUnit { tau, kelvin, occupation };
enum class GridKind { log, linear };

struct RunConfig {
  // [scenario]
  std::string kind = "NH";  // RP, CH, NH or file
  std::string coordinates;  // required when kind = file
  double scale = 700.0;
  std::optional<double> radius;  // m, rings only
  std::optional<double> omega_a;  // rad/s
  std::optional<double> gamma_in;
  std::optional<double> gamma_out;
  std::optional<Vec3> dipole;
  std::array<std::optional<double>, 5> offsets{};  // per ring slot, overrides the preset

  // [terms]
  TermToggles terms;
  double atomic_frequency = 0.0;  // hbar omega_a units; 0 works in the rotating frame

  // [bath]
  TemperatureUnit bath_unit = TemperatureUnit::tau;
  double bath_value = 0.47;
  std::vector<double> local_occupations;  // advanced: per-site override
  std::optional<double> nonlocal_occupation;

  // [sweep]
  TemperatureUnit sweep_unit = TemperatureUnit::tau;
  double sweep_min = 0.05;
  double sweep_max = 5.0;
  std::size_t sweep_points = 40;
  GridKind sweep_grid = GridKind::log;

  // [angle]
  std::string angle_slot = "p";
  double theta_min = 0.0;
  double theta_max = 0.6;
  std::size_t theta_points = 13;

  // [dynamics]
  double t_min = 0.01;
  double t_max = 2000.0;
  std::size_t t_points = 60;
  GridKind t_grid = GridKind::log;
  Integrator method = Integrator::automatic;
  double rtol = 1e-10;
  double atol = 1e-12;
  bool pair_fluxes = false;

  // [solver]
  double residual_tolerance = 1e-10;
  int max_refinements = 4;

  // [toy]
  std::vector<double> toy_n_b{0.1};
  double toy_gamma_nl = 0.5;
  double toy_n_h_min = 1e-3;
  double toy_n_h_max = 1e2;
  std::size_t toy_n_h_points = 20;

  // [run]
  unsigned jobs = 1;
  std::string out;  // "-" for standard output; empty picks the default

  SteadyStateOptions steady_options() const;
  EvolveOptions evolve_options() const;
};

/// Every recognised "section.key", in dump order.
std::vector<std::string> config_keys();

/// Parses `value` into the field named by `key`; throws ConfigError.
void set_value(RunConfig& config, const std::string& key, const std::string& value);
/// "section.key=value" form used by --set.
void apply_assignment(RunConfig& config, const std::string& assignment);
/// Applies every key of an INI file on top of `config`.
void apply_file(RunConfig& config, const std::string& path);

std::string get_value(const RunConfig& config, const std::string& key);
/// Full configuration as INI text; reading it back gives the same config.
std::string to_ini(const RunConfig& config);

/// Checks cross-field invariants: tolerances positive, grids ordered,
/// referenced files present.
void validate(const RunConfig& config);

bool is_ring(const RunConfig& config);
RingScenario ring_scenario(const RunConfig& config);
Scenario build_scenario(const RunConfig& config);
/// Bath for single-point runs.
BathSpec bath(const RunConfig& config, double omega_a);
/// Reduced temperatures of the sweep grid.
std::vector<double> sweep_taus(const RunConfig& config, double omega_a);
std::vector<double> time_grid(const RunConfig& config);

}  // namespace qtransport::cli
