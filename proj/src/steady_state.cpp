#include "chi3opo/steady_state.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "chi3opo/fluctuations.hpp"

namespace chi3opo {

namespace {

constexpr double kOscillationFloor = 1e-8;  // A^2 above this counts as oscillating
constexpr double kRootDedupe = 1e-6;
constexpr double kResidualTol = 1e-10;

// Reduced steady-state system in (P, N) = (A_p^2, A^2) and its Jacobian.
struct Reduced {
  double e1, e2;
  double j11, j12, j21, j22;
};

Reduced reduced_system(double p, double nn, double f2, double dp, double ds) {
  const double q = ds - 2.0 * p - 3.0 * nn;
  const double r = dp * p - p * p - 2.0 * nn * (ds - 3.0 * nn);
  Reduced out;
  out.e1 = p * p - 1.0 - q * q;
  out.e2 = f2 * p - (p + 2.0 * nn) * (p + 2.0 * nn) - r * r;
  out.j11 = 2.0 * p + 4.0 * q;
  out.j12 = 6.0 * q;
  out.j21 = f2 - 2.0 * (p + 2.0 * nn) - 2.0 * r * (dp - 2.0 * p);
  out.j22 = -4.0 * (p + 2.0 * nn) - 2.0 * r * (12.0 * nn - 2.0 * ds);
  return out;
}

// Damped Newton iteration on the reduced system; returns true on convergence.
bool newton_reduced(double& p, double& nn, double f2, double dp, double ds) {
  for (int it = 0; it < 80; ++it) {
    const Reduced s = reduced_system(p, nn, f2, dp, ds);
    const double norm = std::hypot(s.e1, s.e2);
    if (norm < 1e-13 * (1.0 + f2)) return true;
    const double det = s.j11 * s.j22 - s.j12 * s.j21;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    const double step_p = (s.e2 * s.j12 - s.e1 * s.j22) / det;
    const double step_n = (s.e1 * s.j21 - s.e2 * s.j11) / det;
    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      const double tp = p + lambda * step_p;
      const double tn = nn + lambda * step_n;
      if (std::isfinite(tp) && std::isfinite(tn)) {
        const Reduced t = reduced_system(tp, tn, f2, dp, ds);
        if (std::hypot(t.e1, t.e2) < norm) {
          p = tp;
          nn = tn;
          moved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!moved) return norm < 1e-9 * (1.0 + f2);
    if (std::abs(p) > 1e3 || std::abs(nn) > 1e3) return false;
  }
  const Reduced s = reduced_system(p, nn, f2, dp, ds);
  return std::hypot(s.e1, s.e2) < 1e-9 * (1.0 + f2);
}

void flag_stability(SteadyState& s) {
  s.stable = stability(linearize(s)).stable;
}

SteadyState make_pump_only(double p, const NormalizedParams& n) {
  SteadyState s;
  s.params = n;
  s.branch_kind = BranchKind::kPumpOnly;
  const double theta_p = p > 0.0 ? -std::atan2(n.delta_p - p, 1.0) : 0.0;
  s.pump = ComplexAmplitude(std::sqrt(std::max(p, 0.0)), theta_p);
  s.signal = ComplexAmplitude(0.0, 0.0);
  s.idler = ComplexAmplitude(0.0, 0.0);
  flag_stability(s);
  return s;
}

}  // namespace

Field3 classical_rhs(const Field3& alpha, const NormalizedParams& n) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const double ds = n.signal_detuning();
  const C ap = alpha[0], as = alpha[1], ai = alpha[2];
  const double np = std::norm(ap), ns = std::norm(as), ni = std::norm(ai);
  const double f = std::sqrt(n.f2);
  Field3 out;
  out[0] = -(1.0 + i * n.delta_p) * ap +
           i * ((np + 2.0 * ns + 2.0 * ni) * ap + 2.0 * std::conj(ap) * as * ai) + f;
  out[1] = -(1.0 + i * ds) * as +
           i * ((2.0 * np + ns + 2.0 * ni) * as + ap * ap * std::conj(ai));
  out[2] = -(1.0 + i * ds) * ai +
           i * ((2.0 * np + 2.0 * ns + ni) * ai + ap * ap * std::conj(as));
  return out;
}

double fixed_point_residual(const SteadyState& s) {
  const Field3 r = classical_rhs(s.fields(), s.params);
  double m = 0.0;
  for (const auto& z : r) m = std::max(m, std::abs(z));
  return m;
}

std::vector<SteadyState> solve_pump_only(const NormalizedParams& n) {
  n.validate();
  std::vector<SteadyState> out;
  if (n.f2 <= 0.0) {
    out.push_back(make_pump_only(0.0, n));
    return out;
  }
  // Companion-matrix roots of P^3 - 2 dp P^2 + (1 + dp^2) P - F^2.
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 2) = n.f2;
  companion(1, 2) = -(1.0 + n.delta_p * n.delta_p);
  companion(2, 2) = 2.0 * n.delta_p;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::Vector3cd roots = Eigen::EigenSolver<Eigen::Matrix3d>(companion).eigenvalues();
  std::vector<double> ps;
  for (int k = 0; k < 3; ++k) {
    const auto z = roots(k);
    if (std::abs(z.imag()) < 1e-9 * (1.0 + std::abs(z)) && z.real() > 0.0) {
      // Polish with scalar Newton on g(P) = P[1 + (dp - P)^2] - F^2.
      double p = z.real();
      for (int it = 0; it < 50; ++it) {
        const double d = n.delta_p - p;
        const double g = p * (1.0 + d * d) - n.f2;
        const double dg = 1.0 + d * d - 2.0 * p * d;
        if (std::abs(dg) < 1e-300) break;
        const double step = g / dg;
        p -= step;
        if (std::abs(step) < 1e-15 * (1.0 + p)) break;
      }
      if (p > 0.0 && !std::any_of(ps.begin(), ps.end(), [&](double q) {
            return std::abs(q - p) < kRootDedupe;
          }))
        ps.push_back(p);
    }
  }
  std::sort(ps.begin(), ps.end());
  for (double p : ps) out.push_back(make_pump_only(p, n));
  return out;
}

std::vector<SteadyState> solve_oscillating(const NormalizedParams& n) {
  n.validate();
  std::vector<SteadyState> out;
  if (n.f2 <= 0.0) return out;
  const double dp = n.delta_p;
  const double ds = n.signal_detuning();

  std::vector<std::pair<double, double>> roots;
  constexpr int kSeeds = 32;
  for (int ip = 0; ip < kSeeds; ++ip) {
    for (int in = 0; in < kSeeds; ++in) {
      double p = 10.0 * (ip + 0.5) / kSeeds;
      double nn = 10.0 * (in + 0.5) / kSeeds;
      if (!newton_reduced(p, nn, n.f2, dp, ds)) continue;
      if (!(nn > kOscillationFloor) || !(p >= 1.0 - 1e-9)) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
        return std::abs(r.first - p) < kRootDedupe && std::abs(r.second - nn) < kRootDedupe;
      });
      if (!dup) roots.emplace_back(p, nn);
    }
  }
  std::sort(roots.begin(), roots.end());

  for (const auto& [p, nn] : roots) {
    // phi = 2 theta_p - theta_s - theta_i from P e^{i phi} = (ds - 2P - 3N) - i.
    const double phi = std::atan2(-1.0, ds - 2.0 * p - 3.0 * nn);
    const std::complex<double> w(1.0 + 2.0 * nn / p,
                                 dp - p - (2.0 * nn / p) * (ds - 3.0 * nn));
    const double theta_p = -std::arg(w);
    const double theta_s = theta_p - 0.5 * phi;
    SteadyState s;
    s.params = n;
    s.branch_kind = BranchKind::kOscillating;
    s.pump = ComplexAmplitude(std::sqrt(p), theta_p);
    s.signal = ComplexAmplitude(std::sqrt(nn), theta_s);
    s.idler = ComplexAmplitude(std::sqrt(nn), theta_s);
    if (fixed_point_residual(s) > kResidualTol) continue;
    flag_stability(s);
    out.push_back(s);
  }
  return out;
}

std::vector<SteadyState> solve_all(const NormalizedParams& n) {
  std::vector<SteadyState> out = solve_pump_only(n);
  std::vector<SteadyState> osc = solve_oscillating(n);
  out.insert(out.end(), osc.begin(), osc.end());
  return out;
}

SweepResult sweep_power(const NormalizedParams& base, const std::vector<double>& f2_grid) {
  for (size_t k = 1; k < f2_grid.size(); ++k)
    if (f2_grid[k] < f2_grid[k - 1]) throw std::invalid_argument("F^2 grid must be monotone");
  SweepResult result;
  result.axis = f2_grid;
  result.branches.reserve(f2_grid.size());
  for (double f2 : f2_grid) {
    NormalizedParams n = base;
    n.f2 = f2;
    std::vector<SteadyState> states = solve_all(n);
    if (!result.branches.empty()) {
      // Nearest-neighbor continuity in (A_p^2, A^2) against the previous point.
      const auto& prev = result.branches.back();
      std::vector<SteadyState> ordered;
      std::vector<bool> used(states.size(), false);
      for (const auto& ref : prev) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < states.size(); ++k) {
          if (used[k] || states[k].branch_kind != ref.branch_kind) continue;
          const double d = std::hypot(states[k].pump_photons() - ref.pump_photons(),
                                      states[k].signal_photons() - ref.signal_photons());
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
          }
        }
        if (best >= 0) {
          used[best] = true;
          ordered.push_back(states[best]);
        }
      }
      for (size_t k = 0; k < states.size(); ++k)
        if (!used[k]) ordered.push_back(states[k]);
      states = std::move(ordered);
    }
    result.branches.push_back(std::move(states));
  }
  return result;
}

}  // namespace chi3opo
