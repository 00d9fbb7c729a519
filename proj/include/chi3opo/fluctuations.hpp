// Linearized quantum fluctuations around a classical steady state and the
// symmetrized output-field noise spectral densities.
//
// Fluctuations are expressed in phase-referenced quadratures: writing
// a_j = (A_j + delta a_j) e^{i theta_j} and b_j = e^{-i theta_j} delta a_j,
// the vector delta X = {y_p, x_p, y_+, x_+, y_-, x_-} with
// x = (b + b^dag)/sqrt(2), y = -i(b - b^dag)/sqrt(2) obeys
//   d(delta X)/dtau = drift * delta X + input_coupling * dX_in
//                     + loss_coupling * dX_loss,
// where both ports carry delta-correlated vacuum noise of spectral density
// 1/2 per quadrature.  The drift is block diagonal: the pump couples only to
// the sum block {y_p, x_p, y_+, x_+}; the difference block {y_-, x_-} is the
// same with or without pump fluctuations.
//
// Output fields follow the beam-splitter relation a_out = -a_in + sqrt(2 gamma) a.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "chi3opo/steady_state.hpp"

namespace chi3opo {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

struct FluctuationSystem {
  Matrix6d drift;           // d(delta X)/dtau = drift * delta X + noise
  Matrix6d input_coupling;  // sqrt(2 * gamma/Gamma) * I
  Matrix6d loss_coupling;   // sqrt(2 * mu/Gamma) * I
  SteadyState base;
};

// Analytic Jacobian of the classical equations about the steady state, in the
// declared quadrature ordering.  Throws std::invalid_argument when the state
// does not satisfy its fixed-point residual bound.
FluctuationSystem linearize(const SteadyState& state);

struct StabilityReport {
  bool stable = false;
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part
  // Oscillating states carry an exact zero drift eigenvalue from the free
  // signal-idler phase difference (a gauge direction, not a physical decay
  // channel).  It is excluded from the stability verdict; this flag records
  // that the exclusion was applied.
  bool gauge_mode_excluded = false;
};

// stable <=> every drift eigenvalue (gauge mode excluded for oscillating
// states) has real part < -1e-9.
StabilityReport stability(const FluctuationSystem& fs);

struct SpectralDensity {
  double omega = 0.0;
  // Symmetric matrix of symmetrized output quadrature covariances; 6x6 on the
  // declared ordering, or 4x4 on {y_+, x_+, y_-, x_-} for the pump-classical
  // reduction.  Vacuum level is 1/2 per diagonal entry.
  Eigen::MatrixXd matrix;
};

// Symmetrized stationary output spectrum at analysis frequency omega:
//   G(w)  = (-i w I - M)^{-1},
//   S(w)  = (1/2) Re[(2g G - I)(2g G - I)^H + 4 g (1-g) G G^H],  g = gamma/Gamma.
// Throws std::domain_error when the system is not stable (no stationary state).
SpectralDensity output_spectrum(const FluctuationSystem& fs, double omega);

// Spectrum of the reduced 4-dim system with the pump treated classically
// (delta a_p -> 0): drops the pump rows/columns of the drift and solves the
// {y_+, x_+, y_-, x_-} block alone.
SpectralDensity pump_classical_spectrum(const FluctuationSystem& fs, double omega);

// Symplectic form Omega with [X_j, X_k] = i Omega_jk for the declared
// per-mode (y, x) ordering: block-diagonal copies of [[0, -1], [1, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

// Minimum eigenvalue of the Hermitian matrix S + (i/2) Omega; >= 0 (up to
// roundoff) for any physical Gaussian state (uncertainty principle).
double physicality_margin(const SpectralDensity& s);

}  // namespace chi3opo
