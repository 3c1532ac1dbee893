#pragma once

#include "qtransport/observables.hpp"
#include "qtransport/solvers.hpp"

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qtransport {

/// A runnable configuration: geometry, drive, enabled terms and the site
/// subsets whose path fractions are reported.
struct Scenario {
  std::string name;
  NetworkSpec network;
  DriveSpec drive;
  AssemblyOptions options;
  std::vector<std::pair<SiteSubset, SiteSubset>> paths;
};

enum class RingKind { RP, CH, NH };

RingKind parse_ring_kind(const std::string& text);
std::string to_string(RingKind kind);

/// Five emitters on a circle in the z = 0 plane, dipoles along z. Slot k sits
/// at angle 2 pi k / 5 plus its offset (positive = counterclockwise).
struct RingScenario {
  double radius = 0.4e-6;  // m
  std::array<double, 5> angular_offsets{};
  /// Slot names counterclockwise; "p" pumps and "e" extracts.
  std::array<std::string, 5> site_order{"p", "2", "3", "e", "5"};
  double omega_a = 1e14;
  DriveSpec drive{1e-3, 1e2};

  /// Slot index carrying a given name; throws if absent.
  std::size_t slot(const std::string& name) const;
  NetworkSpec network() const;
  /// Network plus the {p,2} -> {3,5} -> {e} path subsets.
  Scenario scenario(const std::string& name) const;
};

/// Ring displacement used by the CH and NH presets.
inline constexpr double preset_displacement = 0.37;  // rad

RingScenario ring_preset(RingKind kind);
NetworkSpec make_ring(RingKind kind);

/// Malformed coordinate file; what() carries "path:line: message".
class CoordinateParseError : public std::runtime_error {
 public:
  CoordinateParseError(const std::string& path, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads `label x y z role` lines (meters, role in {p, e, -}); blank lines
/// and lines starting with '#' are skipped. Positions are multiplied by scale.
NetworkSpec load_coordinates(const std::string& path, double scale);

struct ImportedScenario {
  std::string path;
  double scale = 700.0;
  double omega_a = 1e14;
  DriveSpec drive{1e-3, 2.5e2};
  Vec3 dipole = Vec3::UnitX();

  NetworkSpec network() const;
  Scenario scenario(const std::string& name) const;
};

/// Logarithmic grid of `points` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);
/// Evenly spaced grid from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// Default reduced-temperature grid k_B T / (hbar omega_a).
std::vector<double> default_tau_grid();

/// Steady state with its pump-off baseline and the derived report.
struct StationaryPoint {
  CouplingTable table;
  SteadyStateResult pumped;
  SteadyStateResult baseline;
  FluxReport report;
};

StationaryPoint solve_stationary(const Scenario& scenario, const BathSpec& bath,
                                 const SteadyStateOptions& options = {});

/// chi(t) from a pumped trajectory and a pump-off trajectory started from
/// the same state.
struct DynamicsResult {
  CouplingTable table;
  Trajectory pumped;
  Trajectory baseline;
  std::vector<double> chi_flux;        // (E(t) - E0(t)) / P(t)
  std::vector<double> chi_cumulative;  // (U_E - U_E0) / U_P
  std::vector<double> pump_rate;       // P(t)
  std::vector<double> extraction_rate; // E(t)
  std::vector<double> baseline_rate;   // E0(t)
};

DynamicsResult solve_dynamics(const Scenario& scenario, const BathSpec& bath,
                              const std::vector<double>& t_grid,
                              const EvolveOptions& options = {},
                              const std::optional<DensityMatrix>& initial = std::nullopt);

struct SweepPoint {
  double parameter = 0.0;
  double secondary = 0.0;  // second grid coordinate (tau for angle sweeps)
  double occupation = 0.0;
  std::optional<FluxReport> report;
  double residual = 0.0;
  std::string error;  // empty on success
};

/// Runs fn(0..count-1) on up to `jobs` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned jobs, const std::function<T(std::size_t)>& fn);

/// One stationary solve per reduced temperature.
std::vector<SweepPoint> sweep_temperature(const Scenario& scenario, const std::vector<double>& taus,
                                          const SteadyStateOptions& options = {}, unsigned jobs = 1);

/// Ring with the "p" slot offset swept over `thetas` at every tau; the rest
/// of the ring keeps its offsets. Points are ordered tau-major.
std::vector<SweepPoint> sweep_angle(const RingScenario& ring, const std::string& slot_name,
                                    const std::vector<double>& thetas, const std::vector<double>& taus,
                                    const SteadyStateOptions& options = {}, unsigned jobs = 1);

}  // namespace qtransport

#include "qtransport/detail/parallel.hpp"
