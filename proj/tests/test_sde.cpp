#include <doctest.h>

#include <cmath>

#include "chi3opo/sde.hpp"
#include "helpers.hpp"

using namespace chi3opo;

namespace {

FluctuationSystem vacuum_system() {
  NormalizedParams n;
  n.f2 = 0.0;
  const auto states = solve_pump_only(n);
  REQUIRE(states.size() == 1);
  return linearize(states[0]);
}

}  // namespace

TEST_CASE("splitmix64 reproduces the published sequence") {
  std::uint64_t state = 0;
  CHECK(rng::splitmix64_next(state) == 0xE220A8397B1DCDAFull);
  CHECK(rng::splitmix64_next(state) == 0x6E789E6AA1B965F4ull);
  CHECK(rng::splitmix64_next(state) == 0x06C45D188009454Full);
}

TEST_CASE("generator streams are deterministic and seed-sensitive") {
  rng::Xoshiro256pp a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next();
    all_equal = all_equal && (va == b.next());
    any_diff = any_diff || (va != c.next());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("normal sampler has standard moments and tails") {
  rng::NormalSampler draw(20240817);
  const long n = 20'000'000;
  double sum = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0;
  long tail35 = 0;
  double max_abs = 0.0;
  for (long i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum2 += x * x;
    sum3 += x * x * x;
    sum4 += x * x * x * x;
    if (std::abs(x) > 3.5) ++tail35;
    max_abs = std::max(max_abs, std::abs(x));
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double skew = sum3 / n;
  const double kurt = sum4 / n;
  // 5-sigma statistical windows for each moment estimator.
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(skew) < 5.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(kurt - 3.0) < 5.0 * std::sqrt(96.0 / n));
  // Tail mass beyond 3.5 sigma: 2*Phi(-3.5) = 4.653e-4.
  const double p = 4.6525e-4;
  const double se = std::sqrt(p * (1.0 - p) * n);
  CHECK(std::abs(tail35 - p * n) < 5.0 * se);
  CHECK(max_abs > 4.5);   // the far tail is actually exercised
  CHECK(max_abs < 7.0);   // and not corrupted
}

TEST_CASE("ensemble estimate is deterministic in the seed") {
  const FluctuationSystem fs = vacuum_system();
  SdeConfig cfg;
  cfg.seed = 7;
  cfg.duration = 60.0;
  cfg.transient = 2.0;
  cfg.n_trajectories = 20;
  const auto a = simulate_linear(fs, cfg);
  const auto b = simulate_linear(fs, cfg);
  REQUIRE(a.size() == 1);
  CHECK((a[0].mean - b[0].mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a[0].std_error - b[0].std_error).cwiseAbs().maxCoeff() == 0.0);
  cfg.seed = 8;
  const auto c = simulate_linear(fs, cfg);
  CHECK((a[0].mean - c[0].mean).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("vacuum ensemble reproduces shot noise within errors") {
  const FluctuationSystem fs = vacuum_system();
  SdeConfig cfg;
  cfg.seed = 99;
  cfg.duration = 400.0;
  cfg.transient = 5.0;
  cfg.n_trajectories = 300;
  cfg.frequencies = {0.015, 0.4};
  const auto res = simulate_linear(fs, cfg);
  REQUIRE(res.size() == 2);
  for (const auto& r : res) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double want = i == j ? 0.5 : 0.0;
        const double se = std::max(r.std_error(i, j), 1e-12);
        CHECK(std::abs(r.mean(i, j) - want) < 4.0 * se);
      }
    }
    // Stationarity: the two halves must agree within combined errors.
    for (int i = 0; i < 6; ++i) {
      const double se = std::hypot(r.first_half_error(i, i), r.second_half_error(i, i));
      CHECK(std::abs(r.first_half(i, i) - r.second_half(i, i)) < 4.0 * se);
    }
  }
}

TEST_CASE("error bars shrink with ensemble size") {
  const FluctuationSystem fs = vacuum_system();
  SdeConfig small, large;
  small.seed = large.seed = 5;
  small.duration = large.duration = 80.0;
  small.transient = large.transient = 2.0;
  small.n_trajectories = 40;
  large.n_trajectories = 160;
  const double se_small = simulate_linear(fs, small)[0].std_error.diagonal().mean();
  const double se_large = simulate_linear(fs, large)[0].std_error.diagonal().mean();
  const double ratio = se_large / se_small;  // expect about 1/2
  CHECK(ratio > 0.3);
  CHECK(ratio < 0.75);
}

TEST_CASE("configuration guards reject misuse") {
  const FluctuationSystem fs = vacuum_system();
  SdeConfig cfg;
  cfg.dt = 0.02;
  CHECK_THROWS_AS(simulate_linear(fs, cfg), std::invalid_argument);
  cfg.dt = 0.01;
  cfg.n_trajectories = 0;
  CHECK_THROWS_AS(simulate_linear(fs, cfg), std::invalid_argument);
  cfg.n_trajectories = 10;
  cfg.frequencies = {};
  CHECK_THROWS_AS(simulate_linear(fs, cfg), std::invalid_argument);
  cfg.frequencies = {0.015};
  cfg.duration = -1.0;
  CHECK_THROWS_AS(simulate_linear(fs, cfg), std::invalid_argument);

  // Unstable dynamics have no stationary spectrum to estimate.
  NormalizedParams n;
  n.delta_p = 3.0;
  n.f2 = 6.0;
  for (double f2 = 2.0; f2 <= 12.0; f2 += 0.25) {
    n.f2 = f2;
    const auto states = solve_pump_only(n);
    if (states.size() == 3) {
      SdeConfig ok;
      CHECK_THROWS_AS(simulate_linear(linearize(states[1]), ok), std::domain_error);
      return;
    }
  }
  FAIL("no bistable point found");
}
