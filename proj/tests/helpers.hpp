// Shared test utilities: independent oracles kept deliberately separate from
// the library implementations they cross-check.
#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "chi3opo/sde.hpp"
#include "chi3opo/steady_state.hpp"

namespace testutil {

using chi3opo::Field3;
using chi3opo::NormalizedParams;
using chi3opo::SteadyState;
using chi3opo::Vector6d;
using chi3opo::Matrix6d;

// Deterministic uniform numbers for randomized checks.
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}
  double uniform(double lo, double hi) {
    const std::uint64_t bits = chi3opo::rng::splitmix64_next(state);
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

// Classical flow expressed in the rotated quadrature coordinates used by the
// drift matrix: the exact Jacobian of this map at zero displacement is the
// drift, so central differences give an independent check.
inline Vector6d quad_rhs(const SteadyState& s, const NormalizedParams& n, const Vector6d& dx) {
  const double r = 1.0 / std::sqrt(2.0);
  const double yp = dx[0], xp = dx[1];
  const double ys = r * (dx[2] + dx[4]), xs = r * (dx[3] + dx[5]);
  const double yi = r * (dx[2] - dx[4]), xi = r * (dx[3] - dx[5]);

  const double th[3] = {s.pump.phase, s.signal.phase, s.idler.phase};
  Field3 a = s.fields();
  const double inv_sqrt2 = r;
  a[0] += std::polar(1.0, th[0]) * std::complex<double>(xp, yp) * inv_sqrt2;
  a[1] += std::polar(1.0, th[1]) * std::complex<double>(xs, ys) * inv_sqrt2;
  a[2] += std::polar(1.0, th[2]) * std::complex<double>(xi, yi) * inv_sqrt2;

  const Field3 f = chi3opo::classical_rhs(a, n);
  const Field3 f0 = chi3opo::classical_rhs(s.fields(), n);
  std::complex<double> g[3];
  for (int j = 0; j < 3; ++j) {
    g[j] = std::sqrt(2.0) * std::polar(1.0, -th[j]) * (f[j] - f0[j]);
  }
  Vector6d out;
  out[0] = g[0].imag();
  out[1] = g[0].real();
  out[2] = r * (g[1].imag() + g[2].imag());
  out[3] = r * (g[1].real() + g[2].real());
  out[4] = r * (g[1].imag() - g[2].imag());
  out[5] = r * (g[1].real() - g[2].real());
  return out;
}

inline Matrix6d fd_drift(const SteadyState& s, const NormalizedParams& n, double h = 1e-5) {
  Matrix6d j;
  for (int c = 0; c < 6; ++c) {
    Vector6d e = Vector6d::Zero();
    e[c] = h;
    j.col(c) = (quad_rhs(s, n, e) - quad_rhs(s, n, -e)) / (2.0 * h);
  }
  return j;
}

// Brute-force roots of p*(1 + (delta_p - p)^2) = f2 by dense scan + bisection.
inline std::vector<double> pump_cubic_scan(double f2, double delta_p) {
  auto g = [&](double p) { return p * (1.0 + (delta_p - p) * (delta_p - p)) - f2; };
  std::vector<double> roots;
  if (f2 == 0.0) {
    roots.push_back(0.0);
    return roots;
  }
  const double pmax = f2 + 1.0;
  const int m = 40000;
  double prev = g(0.0);
  for (int i = 1; i <= m; ++i) {
    const double p = pmax * static_cast<double>(i) / m;
    const double cur = g(p);
    if (cur == 0.0) roots.push_back(p);
    if (prev * cur < 0.0) {
      double lo = pmax * static_cast<double>(i - 1) / m, hi = p;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(lo) * g(mid) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return roots;
}

// Independent locator for oscillating solutions of the reduced two-variable
// system, via nested dense scans and bisection (no Newton iterations).
//
//   e1(p, n) = p^2 - 1 - (ds - 2p - 3n)^2          (signal modulus balance)
//   e2(p, n) = f2 p - (p + 2n)^2 - (dp p - p^2 - 2n (ds - 3n))^2
//
// Returns (pump photons p, signal photons n) pairs.
inline std::vector<std::pair<double, double>> oscillating_scan(const NormalizedParams& np) {
  const double dp = np.delta_p;
  const double ds = np.signal_detuning();
  const double f2 = np.f2;

  auto e1 = [&](double p, double n) {
    const double q = ds - 2.0 * p - 3.0 * n;
    return p * p - 1.0 - q * q;
  };
  auto e2 = [&](double p, double n) {
    const double r = dp * p - p * p - 2.0 * n * (ds - 3.0 * n);
    const double t = p + 2.0 * n;
    return f2 * p - t * t - r * r;
  };
  auto p_roots = [&](double n) {
    std::vector<double> out;
    const double pmax = 5.0 + 3.0 * std::abs(ds) + 6.0 * n;
    const int m = 2000;
    double prev = e1(1.0, n);
    if (prev == 0.0) out.push_back(1.0);
    for (int i = 1; i <= m; ++i) {
      const double p = 1.0 + (pmax - 1.0) * static_cast<double>(i) / m;
      const double cur = e1(p, n);
      if (prev * cur < 0.0) {
        double lo = 1.0 + (pmax - 1.0) * static_cast<double>(i - 1) / m, hi = p;
        for (int it = 0; it < 120; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (e1(lo, n) * e1(mid, n) <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        out.push_back(0.5 * (lo + hi));
      } else if (cur == 0.0) {
        out.push_back(p);
      }
      prev = cur;
    }
    return out;
  };

  std::vector<std::pair<double, double>> found;
  const double nmax = 10.0;
  const int m = 4000;
  std::vector<double> prev_roots = p_roots(nmax / m * 0.01);
  double prev_n = nmax / m * 0.01;
  for (int i = 1; i <= m; ++i) {
    const double n = nmax * static_cast<double>(i) / m;
    const std::vector<double> roots = p_roots(n);
    if (roots.size() == prev_roots.size()) {
      for (size_t b = 0; b < roots.size(); ++b) {
        const double f_prev = e2(prev_roots[b], prev_n);
        const double f_cur = e2(roots[b], n);
        if (f_prev * f_cur < 0.0) {
          // Bisect in n along branch index b.
          double lo = prev_n, hi = n;
          double flo = f_prev;
          double p_at = roots[b];
          for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            const std::vector<double> rm = p_roots(mid);
            if (b >= rm.size()) break;
            const double fm = e2(rm[b], mid);
            p_at = rm[b];
            if (flo * fm <= 0.0) {
              hi = mid;
            } else {
              lo = mid;
              flo = fm;
            }
          }
          found.emplace_back(p_at, 0.5 * (lo + hi));
        }
      }
    }
    prev_roots = roots;
    prev_n = n;
  }
  return found;
}

}  // namespace testutil
