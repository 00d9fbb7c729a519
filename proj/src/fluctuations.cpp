#include "chi3opo/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chi3opo {

namespace {

constexpr double kStabilityMargin = -1e-9;
constexpr double kGaugeTol = 1e-7;

// Stability of a drift block, excluding the single near-zero gauge eigenvalue
// when the base state oscillates.
StabilityReport block_stability(const Eigen::MatrixXd& m, bool oscillating) {
  StabilityReport report;
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const auto& a, const auto& b) { return a.real() < b.real(); });
  int excluded = -1;
  if (oscillating) {
    double best = kGaugeTol;
    for (size_t k = 0; k < report.eigenvalues.size(); ++k) {
      const double mag = std::abs(report.eigenvalues[k]);
      if (mag < best) {
        best = mag;
        excluded = static_cast<int>(k);
      }
    }
  }
  report.gauge_mode_excluded = excluded >= 0;
  double max_re = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < report.eigenvalues.size(); ++k) {
    if (static_cast<int>(k) == excluded) continue;
    max_re = std::max(max_re, report.eigenvalues[k].real());
  }
  report.stable = max_re < kStabilityMargin;
  return report;
}

Eigen::MatrixXd spectrum_matrix(const Eigen::MatrixXd& m, double omega, double g) {
  const int n = static_cast<int>(m.rows());
  const std::complex<double> i(0.0, 1.0);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd green = (-i * omega * id - m.cast<std::complex<double>>()).inverse();
  const Eigen::MatrixXcd a = 2.0 * g * green - id;
  const Eigen::MatrixXcd b2 = 4.0 * g * (1.0 - g) * (green * green.adjoint());
  Eigen::MatrixXd s = 0.5 * (a * a.adjoint() + b2).real();
  return 0.5 * (s + s.transpose()).eval();  // enforce exact symmetry
}

}  // namespace

FluctuationSystem linearize(const SteadyState& state) {
  if (fixed_point_residual(state) > 1e-8)
    throw std::invalid_argument("linearize: state is not a fixed point");
  const NormalizedParams& n = state.params;
  const double ds = n.signal_detuning();
  const std::array<double, 3> det = {n.delta_p, ds, ds};
  const Field3 alpha = state.fields();
  const std::complex<double> i(0.0, 1.0);
  const double ntot =
      std::norm(alpha[0]) + std::norm(alpha[1]) + std::norm(alpha[2]);

  // Complex-pair Jacobian of the classical equations: ja = df/da, jb = df/da*.
  Eigen::Matrix3cd ja = Eigen::Matrix3cd::Zero();
  Eigen::Matrix3cd jb = Eigen::Matrix3cd::Zero();
  const std::complex<double> ap = alpha[0], as = alpha[1], ai = alpha[2];
  for (int j = 0; j < 3; ++j) ja(j, j) = -(1.0 + i * det[j]) + i * 2.0 * ntot;
  jb(0, 0) = i * ap * ap + 2.0 * i * as * ai;
  ja(0, 1) = 2.0 * i * (std::conj(as) * ap + std::conj(ap) * ai);
  jb(0, 1) = 2.0 * i * as * ap;
  ja(0, 2) = 2.0 * i * (std::conj(ai) * ap + std::conj(ap) * as);
  jb(0, 2) = 2.0 * i * ai * ap;
  ja(1, 0) = 2.0 * i * (std::conj(ap) * as + ap * std::conj(ai));
  jb(1, 0) = 2.0 * i * ap * as;
  jb(1, 1) = i * as * as;
  ja(1, 2) = 2.0 * i * std::conj(ai) * as;
  jb(1, 2) = 2.0 * i * ai * as + i * ap * ap;  // cross-phase plus four-wave mixing
  ja(2, 0) = 2.0 * i * (std::conj(ap) * ai + ap * std::conj(as));
  jb(2, 0) = 2.0 * i * ap * ai;
  ja(2, 1) = 2.0 * i * std::conj(as) * ai;
  jb(2, 1) = 2.0 * i * as * ai + i * ap * ap;
  jb(2, 2) = i * ai * ai;

  // Reference the fluctuations to the steady phases: b_j = e^{-i theta_j} da_j.
  const std::array<double, 3> th = {state.pump.phase, state.signal.phase,
                                    state.idler.phase};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      ja(j, k) *= std::polar(1.0, th[k] - th[j]);
      jb(j, k) *= std::polar(1.0, -th[k] - th[j]);
    }
  }

  // Quadrature blocks, rows (y_j, x_j) x cols (y_k, x_k).
  Matrix6d m = Matrix6d::Zero();
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const std::complex<double> a = ja(j, k), b = jb(j, k);
      m(2 * j + 0, 2 * k + 0) = (a - b).real();
      m(2 * j + 0, 2 * k + 1) = (a + b).imag();
      m(2 * j + 1, 2 * k + 0) = (b - a).imag();
      m(2 * j + 1, 2 * k + 1) = (a + b).real();
    }
  }

  // Rotate signal/idler into the sum/difference basis.
  Matrix6d r = Matrix6d::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  r(0, 0) = r(1, 1) = 1.0;
  r(2, 2) = s; r(2, 4) = s;   // y_+
  r(3, 3) = s; r(3, 5) = s;   // x_+
  r(4, 2) = s; r(4, 4) = -s;  // y_-
  r(5, 3) = s; r(5, 5) = -s;  // x_-

  FluctuationSystem fs;
  fs.drift = r * m * r.transpose();
  const double g = n.gamma_ratio;
  fs.input_coupling = std::sqrt(2.0 * g) * Matrix6d::Identity();
  fs.loss_coupling = std::sqrt(2.0 * (1.0 - g)) * Matrix6d::Identity();
  fs.base = state;
  return fs;
}

StabilityReport stability(const FluctuationSystem& fs) {
  return block_stability(fs.drift, fs.base.branch_kind == BranchKind::kOscillating);
}

SpectralDensity output_spectrum(const FluctuationSystem& fs, double omega) {
  if (!stability(fs).stable)
    throw std::domain_error("output_spectrum: drift is not stable, no stationary spectrum");
  SpectralDensity out;
  out.omega = omega;
  out.matrix = spectrum_matrix(fs.drift, omega, fs.base.params.gamma_ratio);
  return out;
}

SpectralDensity pump_classical_spectrum(const FluctuationSystem& fs, double omega) {
  const Eigen::Matrix4d m_pm = fs.drift.bottomRightCorner<4, 4>();
  if (!block_stability(m_pm, fs.base.branch_kind == BranchKind::kOscillating).stable)
    throw std::domain_error(
        "pump_classical_spectrum: reduced drift is not stable, no stationary spectrum");
  SpectralDensity out;
  out.omega = omega;
  out.matrix = spectrum_matrix(m_pm, omega, fs.base.params.gamma_ratio);
  return out;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    k(2 * j, 2 * j + 1) = -1.0;  // [y, x] = -i
    k(2 * j + 1, 2 * j) = 1.0;
  }
  return k;
}

double physicality_margin(const SpectralDensity& s) {
  const int n_modes = static_cast<int>(s.matrix.rows()) / 2;
  const std::complex<double> i(0.0, 1.0);
  const Eigen::MatrixXcd h =
      s.matrix.cast<std::complex<double>>() +
      0.5 * i * symplectic_form(n_modes).cast<std::complex<double>>();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().minCoeff();
}

}  // namespace chi3opo
