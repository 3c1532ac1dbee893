#pragma once

#include "qtransport/liouvillian.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtransport {

/// Numerical failure of a solve. residual and time are NaN when they do not apply.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { non_unique_steady_state, not_converged, step_underflow };

  SolverError(Kind kind, const std::string& what, double residual, double time);

  Kind kind() const { return kind_; }
  double residual() const { return residual_; }
  double time() const { return time_; }

 private:
  Kind kind_;
  double residual_;
  double time_;
};

struct SteadyStateOptions {
  double residual_tolerance = 1e-10;
  int max_refinements = 4;
  /// Dense singular-value uniqueness check; only honoured for N <= 5.
  bool nullspace_gap = false;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;                 // ||L vec(rho)|| / ||vec(rho)||
  std::optional<double> nullspace_gap;   // sigma_min / sigma_next of the balanced block
};

/// Stationary state of a trace-preserving generator. The balanced block of
/// L is solved with one diagonal row replaced by the trace functional.
SteadyStateResult steady_state(const SparseSuperoperator& l, const SteadyStateOptions& options = {});

/// Logarithmic grid of `points` times from t_min to t_max (inclusive).
std::vector<double> log_time_grid(double t_min, double t_max, std::size_t points);

enum class Integrator {
  automatic,  // explicit until stiffness is detected, implicit afterwards
  explicit_rk,
  implicit,
};

struct EvolveOptions {
  Integrator method = Integrator::automatic;
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-6;
  std::size_t max_steps = 50'000'000;
};

/// Energy meters accumulated along a trajectory, in units of hbar*omega_a.
struct EnergyMeters {
  DriveSpec drive;
  DriveSites sites;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> pumped;     // U_P(t)
  std::vector<double> extracted;  // U_E(t)
  /// Sum of accepted local error estimates (max norm of the state vector).
  double error_estimate = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Time at which the automatic integrator handed over to the implicit scheme.
  std::optional<double> stiffness_switch;
};

/// Integrates d vec(rho)/dt = L vec(rho) and reports rho and the cumulative
/// pumped/extracted energies at every grid time. The first grid time may
/// be > 0; rho0 is taken at t = 0.
Trajectory evolve(const SparseSuperoperator& l, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EnergyMeters& meters,
                  const EvolveOptions& options = {});

}  // namespace qtransport
