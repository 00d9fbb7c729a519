// Domain types and unit conventions for the three-mode chi(3) OPO model.
//
// All internal computation uses normalized quantities: time in units of the
// field decay rate Gamma (tau = Gamma*t), amplitudes rescaled by
// A -> sqrt(Gamma/eta) A, detunings and analysis frequencies in units of
// Gamma.  Physical units appear only at the CLI boundary.
#pragma once

#include <complex>
#include <cstdint>

namespace chi3opo {

inline constexpr double kHBar = 1.054571817e-34;      // J*s
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Laboratory-frame parameters.  Rates are angular (rad/s).  The total field
// decay rate splits as Gamma = gamma (output coupling) + mu (internal loss),
// equal across the three modes.
struct PhysicalParams {
  double pump_wavelength = 1561e-9;  // m
  double linewidth = 0.0;            // Gamma
  double coupling_rate = 0.0;        // gamma
  double loss_rate = 0.0;            // mu
  double nonlinearity = 0.0;         // eta, rad/s per photon
  double input_power = 0.0;          // W
  double pump_detuning = 0.0;        // Delta_p, rad/s (any sign)
  double dispersion = 0.0;           // D3 = 2*Omega_p - Omega_s - Omega_i, rad/s
  double analysis_frequency = 0.0;   // rad/s

  // Throws std::invalid_argument when rates are non-positive or
  // Gamma != gamma + mu.
  void validate() const;

  double pump_angular_frequency() const;  // 2*pi*c / lambda_p
  double intrinsic_q() const;             // omega_p / (2*mu), energy-decay convention
  double loaded_q() const;                // omega_p / (2*Gamma)

  // Builds rates from the quality-factor pair: Gamma = omega_p/(2*Q_loaded),
  // mu = omega_p/(2*Q_intrinsic), gamma = Gamma - mu.
  static PhysicalParams from_quality_factors(double pump_wavelength,
                                             double intrinsic_q,
                                             double loaded_q);
};

// Dimensionless model parameters; the entire analysis chain depends only on
// these five numbers.
struct NormalizedParams {
  double f2 = 0.0;           // normalized input pump power F^2
  double delta_p = 0.0;      // pump detuning / Gamma
  double d3 = 0.0;           // dispersion / Gamma
  double omega = 0.015;      // analysis frequency / Gamma
  double gamma_ratio = 0.55; // gamma / Gamma (escape efficiency)

  void validate() const;  // throws std::invalid_argument

  // Signal/idler carrier detuning implied by energy conservation of the
  // carriers (2*Omega_p = Omega_s + Omega_i) with the symmetric assignment
  // Delta_s = Delta_i = Delta_p - D3/2.
  double signal_detuning() const { return delta_p - 0.5 * d3; }
};

// F^2 = 2*gamma*eta*P_in / (hbar*Omega_p*Gamma^3); detunings divide by Gamma.
NormalizedParams normalize(const PhysicalParams& p);

// Inverse of normalize on the overlapping fields; Gamma, gamma, eta and the
// wavelength come from `reference`.
PhysicalParams denormalize(const NormalizedParams& n, const PhysicalParams& reference);

// Wraps an angle to the canonical branch (-pi, pi].
double canonical_phase(double theta);

// Polar amplitude with canonicalized phase.
struct ComplexAmplitude {
  double modulus = 0.0;  // >= 0
  double phase = 0.0;    // (-pi, pi]

  ComplexAmplitude() = default;
  ComplexAmplitude(double a, double theta);

  std::complex<double> value() const;
  static ComplexAmplitude from_complex(std::complex<double> z);
};

// Quadrature convention: x = (a + a^dag)/sqrt(2), y = -i(a - a^dag)/sqrt(2),
// so [x, y] = i and each vacuum quadrature variance is exactly 1/2.
// Declared ordering of the 6-dim fluctuation vector, with the sum/difference
// basis x_pm = (x_s pm x_i)/sqrt(2), y_pm = (y_s pm y_i)/sqrt(2):
enum QuadratureIndex : int {
  kYp = 0,
  kXp = 1,
  kYplus = 2,
  kXplus = 3,
  kYminus = 4,
  kXminus = 5,
};

inline constexpr double kVacuumVariance = 0.5;

}  // namespace chi3opo
