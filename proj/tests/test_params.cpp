#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chi3opo/params.hpp"

using namespace chi3opo;

TEST_CASE("quality-factor construction reproduces the rate hierarchy") {
  // Loaded Q = 450000 against an intrinsic Q = 1e6 leaves 55% of the decay as
  // useful out-coupling.
  PhysicalParams p = PhysicalParams::from_quality_factors(1561e-9, 1.0e6, 450000.0);
  p.nonlinearity = 1.0;  // validate() insists on a physical Kerr rate
  p.validate();
  CHECK(p.coupling_rate / p.linewidth == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(p.intrinsic_q() == doctest::Approx(1.0e6).epsilon(1e-12));
  CHECK(p.loaded_q() == doctest::Approx(450000.0).epsilon(1e-12));
  CHECK(p.pump_angular_frequency() ==
        doctest::Approx(2.0 * std::numbers::pi * kSpeedOfLight / 1561e-9).epsilon(1e-15));
}

TEST_CASE("normalization matches a direct transcription of the power map") {
  PhysicalParams p = PhysicalParams::from_quality_factors(1561e-9, 1.0e6, 450000.0);
  p.nonlinearity = 2.5;  // Hz per photon
  p.input_power = 1e-3;  // W
  p.pump_detuning = 0.3 * p.linewidth;
  p.dispersion = -2.0 * p.linewidth;

  const NormalizedParams n = normalize(p);
  const double omega_p = p.pump_angular_frequency();
  const double expected_f2 = 2.0 * p.coupling_rate * p.nonlinearity * p.input_power /
                             (kHBar * omega_p * std::pow(p.linewidth, 3));
  CHECK(n.f2 == doctest::Approx(expected_f2).epsilon(1e-14));
  CHECK(n.delta_p == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(n.d3 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(n.gamma_ratio == doctest::Approx(0.55).epsilon(1e-12));

  // Symmetric carrier assignment splits the dispersion between the detunings.
  CHECK(n.signal_detuning() == doctest::Approx(0.3 + 1.0).epsilon(1e-12));

  const PhysicalParams back = denormalize(n, p);
  CHECK(back.input_power == doctest::Approx(p.input_power).epsilon(1e-12));
  CHECK(back.pump_detuning == doctest::Approx(p.pump_detuning).epsilon(1e-12));
  CHECK(back.dispersion == doctest::Approx(p.dispersion).epsilon(1e-12));
}

TEST_CASE("canonical phase lands in (-pi, pi]") {
  const double pi = std::numbers::pi;
  CHECK(canonical_phase(0.0) == 0.0);
  CHECK(canonical_phase(pi) == doctest::Approx(pi));
  CHECK(canonical_phase(-pi) == doctest::Approx(pi));
  CHECK(canonical_phase(3.0 * pi) == doctest::Approx(pi));
  CHECK(canonical_phase(2.0 * pi + 0.25) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(canonical_phase(-2.0 * pi - 0.25) == doctest::Approx(-0.25).epsilon(1e-12));
  for (double t = -20.0; t <= 20.0; t += 0.37) {
    const double c = canonical_phase(t);
    CHECK(c > -pi - 1e-15);
    CHECK(c <= pi + 1e-15);
    CHECK(std::abs(std::remainder(c - t, 2.0 * pi)) < 1e-12);
  }
}

TEST_CASE("complex amplitude stores modulus and canonical phase") {
  const ComplexAmplitude a(2.0, 7.0);
  CHECK(a.modulus == 2.0);
  CHECK(std::abs(a.value() - std::polar(2.0, 7.0)) < 1e-14);
  const ComplexAmplitude b = ComplexAmplitude::from_complex({-1.0, 1.0});
  CHECK(b.modulus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(b.value() - std::complex<double>(-1.0, 1.0)) < 1e-14);
  CHECK_THROWS_AS(ComplexAmplitude(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation rejects bad inputs") {
  NormalizedParams n;
  n.f2 = -1.0;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n.f2 = 1.0;
  n.gamma_ratio = 0.0;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n.gamma_ratio = 1.5;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n.gamma_ratio = 0.55;
  CHECK_NOTHROW(n.validate());

  PhysicalParams p;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PhysicalParams::from_quality_factors(1561e-9, 450000.0, 1.0e6),
                  std::invalid_argument);
}
