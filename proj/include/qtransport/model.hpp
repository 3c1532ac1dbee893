#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/// Domain types shared by every stage of the transport pipeline.
///
/// Unit conventions: positions enter in meters and the atomic frequency in
/// rad/s; everything downstream of the coupling table is dimensionless,
/// with energies in units of hbar*omega_a and rates/times in units of
/// gamma0 and 1/gamma0.
namespace qtransport {

using Vec3 = Eigen::Vector3d;

namespace constants {
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double boltzmann = 1.380649e-23;       // J/K
}  // namespace constants

/// Separations below this many reduced wavelengths (c/omega_a) are rejected.
inline constexpr double min_separation_wavelengths = 1e-4;

enum class Role { plain, pump, extract };

std::string to_string(Role role);
Role parse_role(const std::string& text);

struct EmitterSpec {
  Vec3 position = Vec3::Zero();
  int label = 0;
  Role role = Role::plain;
};

struct NetworkSpec {
  std::vector<EmitterSpec> emitters;
  Vec3 dipole_direction = Vec3::UnitZ();
  double omega_a = 1e14;  // rad/s

  std::size_t size() const { return emitters.size(); }
  /// c / omega_a in meters.
  double reduced_wavelength() const { return constants::speed_of_light / omega_a; }
  double min_separation() const { return min_separation_wavelengths * reduced_wavelength(); }
};

/// Bose-Einstein occupation of the shared blackbody field at omega_a.
struct BathSpec {
  double occupation = 0.0;
  std::optional<double> temperature;  // Kelvin, when the occupation was derived from one

  static BathSpec from_occupation(double n);
  static BathSpec from_temperature(double omega_a, double kelvin);
  /// tau = k_B T / (hbar omega_a).
  static BathSpec from_reduced_temperature(double tau);
};

/// Incoherent pump on the p site and sink on the e site, in units of gamma0.
struct DriveSpec {
  double gamma_in = 0.0;
  double gamma_out = 0.0;
};

/// Canonical indices of the pump and extraction emitters.
struct DriveSites {
  std::size_t pump = 0;
  std::size_t extract = 0;
};

struct Violation {
  std::string message;
  std::vector<std::size_t> emitters;
};

/// Geometric checks only: positions, dipole, frequency, minimum separation.
std::vector<Violation> validate_geometry(const NetworkSpec& spec);

/// Geometric checks plus the role constraint (exactly one pump and one
/// extraction emitter). An empty result means the network is runnable.
std::vector<Violation> validate_network(const NetworkSpec& spec);

/// Throws std::invalid_argument listing every violation.
void require_valid(const std::vector<Violation>& violations, const std::string& context);

/// Resolves role labels to indices; throws if the network is not runnable.
DriveSites resolve_drive_sites(const NetworkSpec& spec);

/// n = 1/(exp(hbar omega_a / k_B T) - 1); T = 0 gives 0.
double photon_number(double omega_a, double kelvin);

/// Same occupation written in the reduced temperature tau = k_B T/(hbar omega_a).
double photon_number_reduced(double tau);

/// Kelvin value of a reduced temperature at frequency omega_a.
double kelvin_from_reduced(double omega_a, double tau);

}  // namespace qtransport
