// Continuous-variable entanglement witnesses evaluated on noise spectral
// density matrices: the two-mode sum/difference witness, its Schmidt-rotated
// refinement, the 4-dim Schmidt transformation of the pump+sum block, and
// van Loock-Furusawa style tripartite inequalities.
//
// Conventions: vacuum quadrature variance 1/2, so the two-mode separability
// bound for Delta^2 x_- + Delta^2 y_+ is exactly 1.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "chi3opo/fluctuations.hpp"

namespace chi3opo {

// ---- signal-idler witnesses on the 4x4 {y_+, x_+, y_-, x_-} spectrum ----

// Delta^2 x_- + Delta^2 y_+ - 1; negative => signal-idler entanglement.
double duan_witness(const SpectralDensity& s4);

// Rotation angles (one per 2x2 block) that diagonalize the sum and difference
// blocks of the spectrum.  The principal-axis branch is chosen so that the
// block's minimum-variance (best squeezed) axis lands on the quadrature used
// by the witness: y_+^rot for the sum block, x_-^rot for the difference
// block.  Angles lie in (-pi/2, pi/2]; an isotropic (degenerate) block maps
// to 0.
struct SchmidtRotation2D {
  double theta_plus = 0.0;
  double theta_minus = 0.0;
};
SchmidtRotation2D schmidt_rotation_2d(const SpectralDensity& s4);

// Rotated-quadrature witness
//   Delta^2 x_-^rot + Delta^2 y_+^rot - |C|,  C = cos(theta_+ - theta_-),
// where (y^rot, x^rot)^T = R(theta) (y, x)^T with R = [[cos, sin], [-sin, cos]].
// Valid separability bound for any angle pair; negative => entanglement.
struct RotatedDuan {
  double witness = 0.0;
  double c = 1.0;
};
RotatedDuan duan_rotated(const SpectralDensity& s4, const SchmidtRotation2D& rot);

// ---- tripartite analysis on the full 6x6 spectrum ----

// Orthogonal transformation diagonalizing the symmetric 4x4 spectral block on
// {x_p, y_p, x_+, y_+} (pump + sum quadratures): u * block * u^T is diagonal
// with the variances sorted ascending, so rows 0 and 1 of u give the two
// least-noisy Schmidt quadratures.  Row signs are fixed by making the first
// nonzero component positive.
struct SchmidtTransform4D {
  Eigen::Matrix4d u = Eigen::Matrix4d::Identity();
  Eigen::Vector4d xi_variances = Eigen::Vector4d::Constant(0.5);
};
SchmidtTransform4D schmidt_transform_4d(const SpectralDensity& s6);

enum class Partition : int {
  kPumpVsSignalIdler = 0,  // p | s,i
  kSignalVsIdlerPump = 1,  // s | i,p
  kIdlerVsSignalPump = 2,  // i | s,p
};

struct VlfResult {
  double value = 0.0;    // Delta^2 u + Delta^2 v
  double bound = 0.0;    // separability bound for the partition
  double witness = 0.0;  // value - bound; negative => inseparable
};

// General two-observable inequality: for real combinations u, v of the
// single-mode quadratures (x_p, y_p, x_s, y_s, x_i, y_i), every state
// separable across partition {a | b,c} obeys
//   Delta^2 u + Delta^2 v >= |c_a| + |c_b + c_c|,
// with c_j = u_xj v_yj - u_yj v_xj the per-mode symplectic products (vacuum
// variance 1/2 units).  Returns (value, bound, value - bound).
VlfResult vlf_witness_general(const SpectralDensity& s6,
                              const Eigen::Matrix<double, 6, 1>& u,
                              const Eigen::Matrix<double, 6, 1>& v,
                              Partition partition);

// Restricted coefficient form: u = sum_k h_k x_k, v = sum_k g_k y_k over the
// modes (p, s, i).  h = (0, 1, -1)/sqrt(2), g = (0, 1, 1)/sqrt(2) with the
// signal partition reduces exactly to duan_witness with bound 1.
// Throws std::invalid_argument for zero coefficient vectors.
VlfResult vlf_witness(const SpectralDensity& s6, const Eigen::Vector3d& h,
                      const Eigen::Vector3d& g, Partition partition);

// Witnesses instantiated with the Schmidt quadratures: the pump partition
// pairs the two least-noisy combinations of the pump+sum block; the signal
// and idler partitions pair x_-^rot with the better of those combinations.
std::array<VlfResult, 3> vlf_schmidt_seeded(const SpectralDensity& s6);

struct VlfOptimum {
  Eigen::Matrix<double, 6, 1> u;
  Eigen::Matrix<double, 6, 1> v;
  VlfResult result;
};

// Numerically minimizes witness = value - bound over unit-normalized (u, v)
// by multi-start Nelder-Mead seeded with the Schmidt combinations, the plain
// sum/difference pair, and deterministic random directions.  The optimum never
// exceeds the Schmidt-seeded witness of the same partition.
VlfOptimum vlf_optimize(const SpectralDensity& s6, Partition partition);

// True iff the signal and idler partition witnesses agree to 1e-9 (exact
// signal-idler exchange symmetry of the model).
bool partition_symmetry_check(const SpectralDensity& s6);

// Basis change from the declared {y_p, x_p, y_+, x_+, y_-, x_-} ordering to
// single-mode quadratures (x_p, y_p, x_s, y_s, x_i, y_i).
Eigen::Matrix<double, 6, 6> single_mode_basis();

// ---- aggregate report for sweep output ----

struct WitnessReport {
  double duan = 0.0;
  bool duan_violated = false;
  SchmidtRotation2D rotation;
  double duan_rotated = 0.0;
  double c = 1.0;
  bool duan_rotated_violated = false;
  std::array<VlfResult, 3> vlf;  // indexed by Partition
  std::array<bool, 3> vlf_violated = {false, false, false};
};

// Computes the pump-classical 4x4 and full 6x6 spectra at omega and evaluates
// every witness.  Requires a stable system.
WitnessReport evaluate_witnesses(const FluctuationSystem& fs, double omega);

}  // namespace chi3opo
