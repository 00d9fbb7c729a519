// Stochastic-integration oracle for the linearized fluctuation dynamics.
//
// Integrates d(delta X) = drift * delta X dtau + sqrt(2 gamma/Gamma) dW_in
// + sqrt(2 mu/Gamma) dW_loss with independent vacuum Wiener increments
// (variance dtau/2 per quadrature component) using Euler-Maruyama, forms the
// output time series through the beam-splitter relation
// X_out = -X_in + sqrt(2 gamma/Gamma) X, and estimates the symmetrized output
// spectral matrix at the requested analysis frequencies with a Hann-windowed
// periodogram per trajectory, averaged over the ensemble.
//
// Everything is deterministic given the master seed: trajectory k draws from
// an xoshiro256++ generator whose four state words are the first four outputs
// of a splitmix64 sequence initialized at
//   master_seed + (k + 1) * 0x9E3779B97F4A7C15,
// so trajectories are independent streams and may be evaluated in any order.
#pragma once

#include <cstdint>
#include <vector>

#include "chi3opo/fluctuations.hpp"

namespace chi3opo {

struct SdeConfig {
  std::uint64_t seed = 1;
  double dt = 0.01;  // integration step; must be <= 0.01
  // Measured span per trajectory (after the transient).  The windowed estimate
  // smooths the spectrum over ~2pi/duration, so the default keeps the standard
  // analysis frequency 0.015 a comfortable ten resolution bins away from the
  // free-phase diffusion peak at zero frequency.
  double duration = 4200.0;
  double transient = 10.0;  // discarded initial span (cavity lifetimes)
  int n_trajectories = 200;
  std::vector<double> frequencies = {0.015};

  void validate() const;  // throws std::invalid_argument
};

// Ensemble spectrum estimate at one frequency.  `mean` and `std_error` are
// entrywise over trajectories; `first_half`/`second_half` are the same
// estimator restricted to the two halves of the measured span (their own Hann
// windows), used for stationarity checks.
struct SdeSpectrum {
  double omega = 0.0;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std_error;
  Eigen::MatrixXd first_half;
  Eigen::MatrixXd first_half_error;
  Eigen::MatrixXd second_half;
  Eigen::MatrixXd second_half_error;
  int n_trajectories = 0;
};

// Runs the ensemble; one result per requested frequency, in request order.
// Throws std::domain_error when the system is unstable.
std::vector<SdeSpectrum> simulate_linear(const FluctuationSystem& fs, const SdeConfig& cfg);

// Deterministic RNG building blocks (exposed for tests).
namespace rng {

std::uint64_t splitmix64_next(std::uint64_t& state);

struct Xoshiro256pp {
  std::uint64_t s[4];
  explicit Xoshiro256pp(std::uint64_t seed);
  std::uint64_t next();
};

// Marsaglia-Tsang ziggurat sampler (128 layers) for the standard normal.
struct NormalSampler {
  explicit NormalSampler(std::uint64_t seed) : gen(seed) {}
  double operator()();
  Xoshiro256pp gen;
};

}  // namespace rng

}  // namespace chi3opo
