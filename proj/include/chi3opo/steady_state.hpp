// Classical mean-field steady states of the three-mode chi(3) OPO.
//
// Normalized classical equations of motion (tau = Gamma*t, ds = delta_p - d3/2):
//   d a_p/dtau = -(1 + i*delta_p) a_p + i[(|a_p|^2 + 2|a_s|^2 + 2|a_i|^2) a_p
//                + 2 conj(a_p) a_s a_i] + F
//   d a_s/dtau = -(1 + i*ds) a_s + i[(2|a_p|^2 + |a_s|^2 + 2|a_i|^2) a_s
//                + a_p^2 conj(a_i)]
//   d a_i/dtau = -(1 + i*ds) a_i + i[(2|a_p|^2 + 2|a_s|^2 + |a_i|^2) a_i
//                + a_p^2 conj(a_s)]
// self-phase modulation (coefficient 1), cross-phase modulation (coefficient 2)
// and four-wave mixing, with the drive F = sqrt(F^2) in the pump equation only.
#pragma once

#include <array>
#include <complex>
#include <vector>

#include "chi3opo/params.hpp"

namespace chi3opo {

using Field3 = std::array<std::complex<double>, 3>;  // (pump, signal, idler)

enum class BranchKind { kPumpOnly, kOscillating };

// One classical solution branch.  Signal and idler share the modulus A; the
// four-wave-mixing term fixes only 2*theta_p - theta_s - theta_i, and the free
// signal-idler phase difference is gauge-fixed to theta_s = theta_i.
struct SteadyState {
  ComplexAmplitude pump;
  ComplexAmplitude signal;
  ComplexAmplitude idler;
  BranchKind branch_kind = BranchKind::kPumpOnly;
  bool stable = false;
  NormalizedParams params;

  Field3 fields() const {
    return {pump.value(), signal.value(), idler.value()};
  }
  double pump_photons() const { return pump.modulus * pump.modulus; }      // A_p^2
  double signal_photons() const { return signal.modulus * signal.modulus; }  // A^2
};

// Right-hand side of the normalized classical equations above.
Field3 classical_rhs(const Field3& alpha, const NormalizedParams& n);

// Max-norm of classical_rhs at the state's mean fields.
double fixed_point_residual(const SteadyState& s);

// All real roots A_p^2 >= 0 of the single-mode Kerr cubic
//   P^3 - 2*delta_p*P^2 + (1 + delta_p^2)*P - F^2 = 0,
// i.e. F^2 = P*[1 + (delta_p - P)^2], with the steady pump phase.  One to
// three branches (Kerr bistability for delta_p > sqrt(3)).  Stability flags
// come from the linearized drift spectrum.
std::vector<SteadyState> solve_pump_only(const NormalizedParams& n);

// All oscillating solutions (A^2 > 1e-8) of the coupled system, found by
// damped Newton iteration on the reduced equations in (P, N) = (A_p^2, A^2):
//   E1 = P^2 - 1 - (ds - 2P - 3N)^2                                   = 0
//   E2 = F^2 P - (P + 2N)^2 - (delta_p P - P^2 - 2N(ds - 3N))^2       = 0
// started from a 32x32 seed grid on [0,10]^2, deduplicating roots closer than
// 1e-6.  Empty result means below threshold.  Steady phases: with
// phi = 2*theta_p - theta_s - theta_i,
//   P e^{i phi} = (ds - 2P - 3N) - i,
//   theta_p = -arg[(1 + 2N/P) + i(delta_p - P - (2N/P)(ds - 3N))],
// and the gauge choice theta_s = theta_i = theta_p - phi/2.
std::vector<SteadyState> solve_oscillating(const NormalizedParams& n);

// Union of solve_pump_only and solve_oscillating.
std::vector<SteadyState> solve_all(const NormalizedParams& n);

struct SweepResult {
  std::vector<double> axis;                        // F^2 grid
  std::vector<std::vector<SteadyState>> branches;  // per grid point
};

// Runs solve_all over a monotone F^2 grid; branch ordering is made continuous
// by nearest-neighbor matching in (A_p^2, A^2) against the previous point.
SweepResult sweep_power(const NormalizedParams& base, const std::vector<double>& f2_grid);

}  // namespace chi3opo
