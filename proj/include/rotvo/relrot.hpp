#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rotvo/bearing.hpp"
#include "rotvo/so3.hpp"

namespace rotvo {

// One correspondence: f observed in frame j, f_prime in frame k. Under pure
// rotation f_prime = R f, where R is the relative rotation returned by the
// solvers below (it maps frame-j bearings into frame k).
struct BearingPair {
  BearingVec f;
  BearingVec f_prime;
};

using CorrSet = std::vector<BearingPair>;

// Eigen-decomposition of a symmetric 3x3 matrix in closed form
// (trigonometric solution of the characteristic cubic).
struct SymEigen3 {
  Vec3 values;      // ascending
  Vec3 min_vector;  // unit eigenvector of values(0), first nonzero entry > 0
};

SymEigen3 SymmetricEigen3(const Mat3& m);

// n = f_prime x (R f), the normal of the epipolar plane through the pair.
inline Vec3 EpipolarNormal(const Mat3& r, const BearingPair& p) {
  return p.f_prime.cross(r * p.f);
}

// Second-moment matrix M = sum n nᵀ of the epipolar normals.
struct NormalCov {
  Mat3 m;
  double lambda_min = 0.0;  // clamped to >= 0
  Vec3 e_min;
};

// Throws kInvalidArgument on an empty set.
NormalCov ComputeNormalCov(const Rot3& r, std::span<const BearingPair> c);

// Smallest eigenvalue of M(R) without clamping; the objective minimized by
// SolveRelRot.
double NormalCovMinEigenvalue(const Mat3& r, std::span<const BearingPair> c);

struct RelRotConfig {
  int min_sample = 5;
  double inlier_thresh = 0.5 * 0.017453292519943295;  // radians
  int max_iters = 50;                                 // LM iterations
  double step_tol = 1e-8;
  double obj_tol = 1e-12;
  double fd_step = 1e-6;  // central-difference step of the gradient
  double confidence = 0.99;
  int ransac_max_iters = 1000;
  uint64_t seed = 0;
};

struct RelRotSolve {
  Rot3 rotation;
  double lambda_min = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Local minimizer of the smallest eigenvalue of M(R) over SO(3), starting
// from `init`. Updates are R <- R exp(delta) with a damped Newton step
// (Levenberg-Marquardt damping, multiplicative adaptation) built from
// central finite differences of the closed-form eigenvalue. Throws
// kInsufficientCorrespondences when |c| < 5.
RelRotSolve SolveRelRot(std::span<const BearingPair> c, const Rot3& init,
                        const RelRotConfig& cfg = {});

struct RelRotResult {
  Rot3 rotation;
  std::vector<int> inliers;  // ascending indices into the input set
  double lambda_min = 0.0;
  bool converged = false;
  int hypotheses = 0;
};

// Angular distance of f_prime from the epipolar plane spanned by the
// translation direction `t_dir` and R f. Zero when the plane is undefined.
double EpipolarResidual(const Mat3& r, const Vec3& t_dir,
                        const BearingPair& p);

// SolveRelRot inside RANSAC with minimal samples of cfg.min_sample and the
// adaptive stopping rule; deterministic given cfg.seed (hypothesis i draws
// from a generator seeded with (seed, i)). Throws kInsufficientCorrespondences
// when |c| < cfg.min_sample and kNoModel when no hypothesis gathers
// cfg.min_sample inliers.
RelRotResult RansacRelRot(std::span<const BearingPair> c, const Rot3& init,
                          const RelRotConfig& cfg = {});

}  // namespace rotvo

namespace rotvo {

// The solvers above estimate the map from frame-j to frame-k bearings, which
// for camera-to-world orientations is R_kᵀ R_j. View-graph edges store the
// composition form R_jᵀ R_k; the two are transposes of each other.
inline Rot3 EdgeRotationFromRelRot(const Rot3& rel) { return rel.inverse(); }
inline Rot3 RelRotFromEdgeRotation(const Rot3& edge) { return edge.inverse(); }

}  // namespace rotvo
