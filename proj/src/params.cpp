#include "chi3opo/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chi3opo {

void PhysicalParams::validate() const {
  if (!(pump_wavelength > 0.0)) throw std::invalid_argument("pump_wavelength must be > 0");
  if (!(linewidth > 0.0)) throw std::invalid_argument("linewidth Gamma must be > 0");
  if (!(coupling_rate > 0.0)) throw std::invalid_argument("coupling_rate gamma must be > 0");
  if (!(loss_rate > 0.0)) throw std::invalid_argument("loss_rate mu must be > 0");
  if (!(nonlinearity > 0.0)) throw std::invalid_argument("nonlinearity eta must be > 0");
  if (!(input_power >= 0.0)) throw std::invalid_argument("input_power must be >= 0");
  const double sum = coupling_rate + loss_rate;
  if (std::abs(sum - linewidth) > 1e-9 * linewidth)
    throw std::invalid_argument("Gamma must equal gamma + mu");
}

double PhysicalParams::pump_angular_frequency() const {
  return 2.0 * std::numbers::pi * kSpeedOfLight / pump_wavelength;
}

double PhysicalParams::intrinsic_q() const {
  return pump_angular_frequency() / (2.0 * loss_rate);
}

double PhysicalParams::loaded_q() const {
  return pump_angular_frequency() / (2.0 * linewidth);
}

PhysicalParams PhysicalParams::from_quality_factors(double pump_wavelength,
                                                    double intrinsic_q,
                                                    double loaded_q) {
  if (!(pump_wavelength > 0.0)) throw std::invalid_argument("pump_wavelength must be > 0");
  if (!(intrinsic_q > loaded_q) || !(loaded_q > 0.0))
    throw std::invalid_argument("require intrinsic_q > loaded_q > 0");
  PhysicalParams p;
  p.pump_wavelength = pump_wavelength;
  const double omega_p = p.pump_angular_frequency();
  p.linewidth = omega_p / (2.0 * loaded_q);
  p.loss_rate = omega_p / (2.0 * intrinsic_q);
  p.coupling_rate = p.linewidth - p.loss_rate;
  return p;
}

void NormalizedParams::validate() const {
  if (!(f2 >= 0.0)) throw std::invalid_argument("f2 must be >= 0");
  if (!(gamma_ratio > 0.0) || !(gamma_ratio <= 1.0))
    throw std::invalid_argument("gamma_ratio must be in (0, 1]");
  if (!std::isfinite(delta_p) || !std::isfinite(d3) || !std::isfinite(omega))
    throw std::invalid_argument("detunings and omega must be finite");
}

NormalizedParams normalize(const PhysicalParams& p) {
  p.validate();
  const double omega_p = p.pump_angular_frequency();
  const double g3 = p.linewidth * p.linewidth * p.linewidth;
  NormalizedParams n;
  n.f2 = 2.0 * p.coupling_rate * p.nonlinearity * p.input_power / (kHBar * omega_p * g3);
  n.delta_p = p.pump_detuning / p.linewidth;
  n.d3 = p.dispersion / p.linewidth;
  n.omega = p.analysis_frequency / p.linewidth;
  n.gamma_ratio = p.coupling_rate / p.linewidth;
  n.validate();
  return n;
}

PhysicalParams denormalize(const NormalizedParams& n, const PhysicalParams& reference) {
  reference.validate();
  n.validate();
  PhysicalParams p = reference;
  const double omega_p = p.pump_angular_frequency();
  const double g3 = p.linewidth * p.linewidth * p.linewidth;
  p.input_power = n.f2 * kHBar * omega_p * g3 / (2.0 * p.coupling_rate * p.nonlinearity);
  p.pump_detuning = n.delta_p * p.linewidth;
  p.dispersion = n.d3 * p.linewidth;
  p.analysis_frequency = n.omega * p.linewidth;
  return p;
}

double canonical_phase(double theta) {
  double t = std::remainder(theta, 2.0 * std::numbers::pi);  // [-pi, pi]
  if (t <= -std::numbers::pi) t = std::numbers::pi;
  return t;
}

ComplexAmplitude::ComplexAmplitude(double a, double theta) {
  if (!(a >= 0.0)) throw std::invalid_argument("modulus must be >= 0");
  modulus = a;
  phase = canonical_phase(theta);
}

std::complex<double> ComplexAmplitude::value() const {
  return std::polar(modulus, phase);
}

ComplexAmplitude ComplexAmplitude::from_complex(std::complex<double> z) {
  const double a = std::abs(z);
  return ComplexAmplitude(a, a > 0.0 ? std::arg(z) : 0.0);
}

}  // namespace chi3opo
