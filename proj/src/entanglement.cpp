#include "chi3opo/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chi3opo {

namespace {

using Vector6 = Eigen::Matrix<double, 6, 1>;

void require_size(const SpectralDensity& s, int n, const char* who) {
  if (s.matrix.rows() != n || s.matrix.cols() != n)
    throw std::invalid_argument(std::string(who) + ": spectrum has wrong dimension");
}

Eigen::Matrix2d rotation2(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

// Principal-axis angle of the symmetric block [[a, c], [c, b]], branch chosen
// so that the minimum-variance axis maps to the requested slot after rotating
// by R(theta).  Isotropic blocks map to 0.
double block_angle(const Eigen::Matrix2d& blk, bool minor_at_first_slot) {
  const double a = blk(0, 0), b = blk(1, 1), c = 0.5 * (blk(0, 1) + blk(1, 0));
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::hypot(a - b, 2.0 * c) < 1e-13 * scale) return 0.0;
  double theta = minor_at_first_slot ? 0.5 * std::atan2(-2.0 * c, b - a)
                                     : 0.5 * std::atan2(2.0 * c, a - b);
  // R(theta) and R(theta + pi) act identically on covariances; keep the
  // canonical branch (-pi/2, pi/2].
  if (theta <= -0.5 * M_PI) theta += M_PI;
  if (theta > 0.5 * M_PI) theta -= M_PI;
  return theta;
}

// Per-mode symplectic products c_j = u_xj v_yj - u_yj v_xj in single-mode
// coordinates, and the separability bound for partition {a | b, c}.
double vlf_bound(const Vector6& u, const Vector6& v, Partition partition) {
  std::array<double, 3> c{};
  for (int j = 0; j < 3; ++j)
    c[j] = u(2 * j) * v(2 * j + 1) - u(2 * j + 1) * v(2 * j);
  switch (partition) {
    case Partition::kPumpVsSignalIdler: return std::abs(c[0]) + std::abs(c[1] + c[2]);
    case Partition::kSignalVsIdlerPump: return std::abs(c[1]) + std::abs(c[0] + c[2]);
    case Partition::kIdlerVsSignalPump: return std::abs(c[2]) + std::abs(c[0] + c[1]);
  }
  throw std::invalid_argument("vlf_bound: unknown partition");
}

VlfResult vlf_eval(const Eigen::Matrix<double, 6, 6>& cov_single, const Vector6& u,
                   const Vector6& v, Partition partition) {
  VlfResult r;
  r.value = u.dot(cov_single * u) + v.dot(cov_single * v);
  r.bound = vlf_bound(u, v, partition);
  r.witness = r.value - r.bound;
  return r;
}

// Least-noise Schmidt quadratures of the pump+sum block and the rotated
// difference quadrature, as single-mode coefficient vectors.
struct SeedVectors {
  Vector6 xi_a, xi_b, x_minus_rot;
};

Vector6 pump_sum_to_single_mode(const Eigen::Vector4d& coeff) {
  // coeff on {x_p, y_p, x_+, y_+} -> (x_p, y_p, x_s, y_s, x_i, y_i).
  const double s = 1.0 / std::sqrt(2.0);
  Vector6 z = Vector6::Zero();
  z(0) = coeff(0);
  z(1) = coeff(1);
  z(2) = coeff(2) * s;  // x_+ -> x_s, x_i
  z(4) = coeff(2) * s;
  z(3) = coeff(3) * s;  // y_+ -> y_s, y_i
  z(5) = coeff(3) * s;
  return z;
}

SeedVectors seed_vectors(const SpectralDensity& s6) {
  const SchmidtTransform4D t4 = schmidt_transform_4d(s6);
  SeedVectors seeds;
  seeds.xi_a = pump_sum_to_single_mode(t4.u.row(0).transpose());
  seeds.xi_b = pump_sum_to_single_mode(t4.u.row(1).transpose());

  SpectralDensity pm;
  pm.omega = s6.omega;
  pm.matrix = s6.matrix.bottomRightCorner<4, 4>();
  const double tm = schmidt_rotation_2d(pm).theta_minus;
  const double s = 1.0 / std::sqrt(2.0);
  Vector6 xm = Vector6::Zero(), ym = Vector6::Zero();
  xm(2) = s;  xm(4) = -s;  // x_- = (x_s - x_i)/sqrt(2)
  ym(3) = s;  ym(5) = -s;  // y_- = (y_s - y_i)/sqrt(2)
  seeds.x_minus_rot = -std::sin(tm) * ym + std::cos(tm) * xm;
  return seeds;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t& state) {
  return 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
}

// Hand-rolled Nelder-Mead on R^n; returns the best vertex found.
template <typename F>
Eigen::VectorXd nelder_mead(F&& f, const Eigen::VectorXd& x0, int max_iter) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int k = 0; k < n; ++k) xs[k + 1](k) += 0.1;
  for (int k = 0; k <= n; ++k) fs[k] = f(xs[k]);
  std::vector<int> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (int k = 0; k <= n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    if (fs[order[n]] - fs[order[0]] < 1e-13 * (1.0 + std::abs(fs[order[0]]))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) centroid += xs[order[k]];
    centroid /= n;
    const int worst = order[n];
    const Eigen::VectorXd refl = centroid + (centroid - xs[worst]);
    const double f_refl = f(refl);
    if (f_refl < fs[order[0]]) {
      const Eigen::VectorXd expd = centroid + 2.0 * (centroid - xs[worst]);
      const double f_expd = f(expd);
      if (f_expd < f_refl) { xs[worst] = expd; fs[worst] = f_expd; }
      else { xs[worst] = refl; fs[worst] = f_refl; }
    } else if (f_refl < fs[order[n - 1]]) {
      xs[worst] = refl;
      fs[worst] = f_refl;
    } else {
      const Eigen::VectorXd contr = centroid + 0.5 * (xs[worst] - centroid);
      const double f_contr = f(contr);
      if (f_contr < fs[worst]) { xs[worst] = contr; fs[worst] = f_contr; }
      else {
        for (int k = 1; k <= n; ++k) {
          xs[order[k]] = xs[order[0]] + 0.5 * (xs[order[k]] - xs[order[0]]);
          fs[order[k]] = f(xs[order[k]]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  return xs[best];
}

}  // namespace

double duan_witness(const SpectralDensity& s4) {
  require_size(s4, 4, "duan_witness");
  return s4.matrix(3, 3) + s4.matrix(0, 0) - 1.0;
}

SchmidtRotation2D schmidt_rotation_2d(const SpectralDensity& s4) {
  require_size(s4, 4, "schmidt_rotation_2d");
  SchmidtRotation2D rot;
  rot.theta_plus = block_angle(s4.matrix.topLeftCorner<2, 2>(), /*minor_at_first_slot=*/true);
  rot.theta_minus = block_angle(s4.matrix.bottomRightCorner<2, 2>(), /*minor_at_first_slot=*/false);
  return rot;
}

RotatedDuan duan_rotated(const SpectralDensity& s4, const SchmidtRotation2D& rot) {
  require_size(s4, 4, "duan_rotated");
  const Eigen::Matrix2d rp = rotation2(rot.theta_plus);
  const Eigen::Matrix2d rm = rotation2(rot.theta_minus);
  const Eigen::Matrix2d sp = rp * s4.matrix.topLeftCorner<2, 2>() * rp.transpose();
  const Eigen::Matrix2d sm = rm * s4.matrix.bottomRightCorner<2, 2>() * rm.transpose();
  RotatedDuan out;
  out.c = std::cos(rot.theta_plus - rot.theta_minus);
  out.witness = sp(0, 0) + sm(1, 1) - std::abs(out.c);
  return out;
}

SchmidtTransform4D schmidt_transform_4d(const SpectralDensity& s6) {
  require_size(s6, 6, "schmidt_transform_4d");
  // Pump + sum block on {x_p, y_p, x_+, y_+} = declared indices {1, 0, 3, 2}.
  const std::array<int, 4> idx = {kXp, kYp, kXplus, kYplus};
  Eigen::Matrix4d block;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) block(r, c) = s6.matrix(idx[r], idx[c]);

  SchmidtTransform4D out;
  const double iso = (block - block(0, 0) * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff();
  if (iso < 1e-12 * std::max(1.0, std::abs(block(0, 0)))) {
    out.u = Eigen::Matrix4d::Identity();
    out.xi_variances = Eigen::Vector4d::Constant(block(0, 0));
    return out;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(block);  // ascending
  out.xi_variances = es.eigenvalues();
  out.u = es.eigenvectors().transpose();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (std::abs(out.u(r, c)) > 1e-12) {
        if (out.u(r, c) < 0.0) out.u.row(r) *= -1.0;
        break;
      }
    }
  }
  return out;
}

VlfResult vlf_witness_general(const SpectralDensity& s6, const Vector6& u,
                              const Vector6& v, Partition partition) {
  require_size(s6, 6, "vlf_witness_general");
  if (u.norm() < 1e-12 || v.norm() < 1e-12)
    throw std::invalid_argument("vlf_witness_general: zero coefficient vector");
  const Eigen::Matrix<double, 6, 6> p = single_mode_basis();
  const Eigen::Matrix<double, 6, 6> cov = p * s6.matrix * p.transpose();
  return vlf_eval(cov, u, v, partition);
}

VlfResult vlf_witness(const SpectralDensity& s6, const Eigen::Vector3d& h,
                      const Eigen::Vector3d& g, Partition partition) {
  if (h.norm() < 1e-12 || g.norm() < 1e-12)
    throw std::invalid_argument("vlf_witness: zero coefficient vector");
  Vector6 u = Vector6::Zero(), v = Vector6::Zero();
  for (int j = 0; j < 3; ++j) {
    u(2 * j) = h(j);      // x components
    v(2 * j + 1) = g(j);  // y components
  }
  return vlf_witness_general(s6, u, v, partition);
}

std::array<VlfResult, 3> vlf_schmidt_seeded(const SpectralDensity& s6) {
  require_size(s6, 6, "vlf_schmidt_seeded");
  const Eigen::Matrix<double, 6, 6> p = single_mode_basis();
  const Eigen::Matrix<double, 6, 6> cov = p * s6.matrix * p.transpose();
  const SeedVectors seeds = seed_vectors(s6);

  std::array<VlfResult, 3> out;
  out[0] = vlf_eval(cov, seeds.xi_a, seeds.xi_b, Partition::kPumpVsSignalIdler);
  for (Partition part : {Partition::kSignalVsIdlerPump, Partition::kIdlerVsSignalPump}) {
    const VlfResult wa = vlf_eval(cov, seeds.x_minus_rot, seeds.xi_a, part);
    const VlfResult wb = vlf_eval(cov, seeds.x_minus_rot, seeds.xi_b, part);
    out[static_cast<int>(part)] = wa.witness <= wb.witness ? wa : wb;
  }
  return out;
}

VlfOptimum vlf_optimize(const SpectralDensity& s6, Partition partition) {
  require_size(s6, 6, "vlf_optimize");
  const Eigen::Matrix<double, 6, 6> p = single_mode_basis();
  const Eigen::Matrix<double, 6, 6> cov = p * s6.matrix * p.transpose();

  const auto objective = [&](const Eigen::VectorXd& z) {
    Vector6 u = z.head<6>(), v = z.tail<6>();
    const double nu = u.norm(), nv = v.norm();
    if (nu < 1e-9 || nv < 1e-9) return 1e6;
    u /= nu;
    v /= nv;
    return vlf_eval(cov, u, v, partition).witness;
  };

  const SeedVectors seeds = seed_vectors(s6);
  Vector6 x_minus = Vector6::Zero(), y_plus = Vector6::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  x_minus(2) = s;  x_minus(4) = -s;
  y_plus(3) = s;   y_plus(5) = s;

  std::vector<Eigen::VectorXd> starts;
  const auto add_start = [&](const Vector6& u, const Vector6& v) {
    Eigen::VectorXd z(12);
    z << u, v;
    starts.push_back(z);
  };
  add_start(seeds.xi_a, seeds.xi_b);
  add_start(seeds.x_minus_rot, seeds.xi_a);
  add_start(seeds.x_minus_rot, seeds.xi_b);
  add_start(x_minus, y_plus);
  std::uint64_t rng_state = 0x5DEECE66Dull;
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd z(12);
    for (int j = 0; j < 12; ++j) z(j) = uniform_pm1(rng_state);
    starts.push_back(z);
  }

  Eigen::VectorXd best;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& z0 : starts) {
    const Eigen::VectorXd z = nelder_mead(objective, z0, 600);
    const double val = objective(z);
    if (val < best_val) {
      best_val = val;
      best = z;
    }
  }

  VlfOptimum out;
  out.u = best.head<6>().normalized();
  out.v = best.tail<6>().normalized();
  out.result = vlf_eval(cov, out.u, out.v, partition);
  return out;
}

bool partition_symmetry_check(const SpectralDensity& s6) {
  const std::array<VlfResult, 3> w = vlf_schmidt_seeded(s6);
  return std::abs(w[1].witness - w[2].witness) <= 1e-9;
}

Eigen::Matrix<double, 6, 6> single_mode_basis() {
  Eigen::Matrix<double, 6, 6> p = Eigen::Matrix<double, 6, 6>::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  p(0, kXp) = 1.0;                   // x_p
  p(1, kYp) = 1.0;                   // y_p
  p(2, kXplus) = s; p(2, kXminus) = s;   // x_s
  p(3, kYplus) = s; p(3, kYminus) = s;   // y_s
  p(4, kXplus) = s; p(4, kXminus) = -s;  // x_i
  p(5, kYplus) = s; p(5, kYminus) = -s;  // y_i
  return p;
}

WitnessReport evaluate_witnesses(const FluctuationSystem& fs, double omega) {
  WitnessReport report;
  const SpectralDensity s4 = pump_classical_spectrum(fs, omega);
  const SpectralDensity s6 = output_spectrum(fs, omega);

  report.duan = duan_witness(s4);
  report.duan_violated = report.duan < 0.0;
  report.rotation = schmidt_rotation_2d(s4);
  const RotatedDuan rd = duan_rotated(s4, report.rotation);
  report.duan_rotated = rd.witness;
  report.c = rd.c;
  report.duan_rotated_violated = rd.witness < 0.0;
  report.vlf = vlf_schmidt_seeded(s6);
  for (int k = 0; k < 3; ++k) report.vlf_violated[k] = report.vlf[k].witness < 0.0;
  return report;
}

}  // namespace chi3opo
