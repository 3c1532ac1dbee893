#include "qtransport/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace qtransport;

namespace {

NetworkSpec pentagon() {
  NetworkSpec spec;
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * M_PI * k / 5.0;
    spec.emitters.push_back({0.4e-6 * Vec3(std::cos(a), std::sin(a), 0.0), k + 1, Role::plain});
  }
  spec.emitters[0].role = Role::pump;
  spec.emitters[3].role = Role::extract;
  return spec;
}

bool mentions(const std::vector<Violation>& v, const std::string& text) {
  for (const auto& x : v)
    if (x.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("photon number at reference points") {
  const double omega = 1e14;
  const double ratio_one = constants::hbar * omega / constants::boltzmann;  // T with hbar w = k T
  CHECK(photon_number(omega, 0.0) == 0.0);
  CHECK(photon_number(omega, ratio_one) == doctest::Approx(1.0 / (M_E - 1.0)).epsilon(1e-12));
  CHECK(photon_number(omega, ratio_one) == doctest::Approx(0.581977).epsilon(1e-6));
  CHECK(photon_number(omega, ratio_one / std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(photon_number_reduced(1.0 / std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(photon_number(omega, -1.0), std::invalid_argument);
}

TEST_CASE("photon number is monotone and depends only on the ratio") {
  double prev = -1.0;
  for (double t = 1.0; t < 1e5; t *= 1.7) {
    const double n = photon_number(1e14, t);
    CHECK(n > prev);
    CHECK(photon_number(2e14, 2.0 * t) == doctest::Approx(n).epsilon(1e-13));
    prev = n;
  }
  const double tau = 0.47;
  CHECK(photon_number(1e14, kelvin_from_reduced(1e14, tau)) ==
        doctest::Approx(photon_number_reduced(tau)).epsilon(1e-13));
}

TEST_CASE("bath constructors agree") {
  const auto a = BathSpec::from_temperature(1e14, 300.0);
  REQUIRE(a.temperature);
  const double tau = constants::boltzmann * 300.0 / (constants::hbar * 1e14);
  CHECK(BathSpec::from_reduced_temperature(tau).occupation == doctest::Approx(a.occupation).epsilon(1e-13));
  CHECK(BathSpec::from_occupation(0.3).occupation == 0.3);
  CHECK_THROWS(BathSpec::from_occupation(-0.1));
}

TEST_CASE("pentagon is a valid network") {
  const auto spec = pentagon();
  CHECK(validate_network(spec).empty());
  const auto sites = resolve_drive_sites(spec);
  CHECK(sites.pump == 0);
  CHECK(sites.extract == 3);
}

TEST_CASE("validation reports problems with their emitters") {
  auto spec = pentagon();
  spec.emitters[1].position = spec.emitters[0].position;
  const auto v = validate_geometry(spec);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message.find("pair (0,1) below r_min") != std::string::npos);
  CHECK(v[0].emitters == std::vector<std::size_t>{0, 1});

  auto bad_dipole = pentagon();
  bad_dipole.dipole_direction = Vec3(0.0, 0.0, 2.0);
  CHECK(mentions(validate_geometry(bad_dipole), "dipole not unit norm"));

  auto two_pumps = pentagon();
  two_pumps.emitters[2].role = Role::pump;
  CHECK(mentions(validate_network(two_pumps), "exactly one pump"));
  CHECK_THROWS_AS(require_valid(validate_network(two_pumps), "net"), std::invalid_argument);
  CHECK_THROWS(resolve_drive_sites(two_pumps));

  auto no_sink = pentagon();
  no_sink.emitters[3].role = Role::plain;
  CHECK(mentions(validate_network(no_sink), "exactly one extract"));

  auto bad_freq = pentagon();
  bad_freq.omega_a = -1.0;
  CHECK_FALSE(validate_geometry(bad_freq).empty());
}

TEST_CASE("role names") {
  for (auto r : {Role::plain, Role::pump, Role::extract}) CHECK(parse_role(to_string(r)) == r);
  CHECK(parse_role("p") == Role::pump);
  CHECK(parse_role("e") == Role::extract);
  CHECK(parse_role("-") == Role::plain);
  CHECK_THROWS(parse_role("x"));
}

}  // TEST_SUITE
