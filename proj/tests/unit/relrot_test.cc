#include "rotvo/relrot.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rotvo/error.hpp"
#include "rotvo/synth.hpp"
#include "test_util.hpp"

namespace rotvo {
namespace {

using testing::RandomUnit;

// Bearings in a 45 deg cone around +z, related by f' = r f.
CorrSet PureRotationPairs(const Rot3& r, int n, std::mt19937_64& rng) {
  CorrSet c;
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  while (static_cast<int>(c.size()) < n) {
    const Vec3 f = Vec3(u(rng), u(rng), 1.0).normalized();
    const Vec3 fp = r.Rotate(f);
    if (fp.z() <= 0.1) continue;
    c.push_back({f, fp});
  }
  return c;
}

TEST(SymmetricEigen3, RootsOfCharacteristicPolynomial) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a.data()[i] = n(rng);
    const Mat3 m = a * a.transpose();
    const SymEigen3 e = SymmetricEigen3(m);
    // p(l) = l^3 - tr l^2 + c1 l - det.
    const double tr = m.trace();
    const double c1 = 0.5 * (tr * tr - (m * m).trace());
    const double det = m.determinant();
    const double scale = 1.0 + m.norm() * m.norm() * m.norm();
    for (int i = 0; i < 3; ++i) {
      const double l = e.values(i);
      EXPECT_LT(std::abs(l * l * l - tr * l * l + c1 * l - det), 1e-9 * scale);
    }
    EXPECT_LE(e.values(0), e.values(1));
    EXPECT_LE(e.values(1), e.values(2));
    const Eigen::SelfAdjointEigenSolver<Mat3> ref(m);
    EXPECT_LT((e.values - ref.eigenvalues()).norm(), 1e-9 * (1 + m.norm()));
    EXPECT_NEAR(e.min_vector.norm(), 1.0, 1e-12);
    EXPECT_LT((m * e.min_vector - e.values(0) * e.min_vector).norm(),
              1e-7 * (1 + m.norm()));
  }
}

TEST(SymmetricEigen3, RepeatedEigenvalues) {
  const SymEigen3 e = SymmetricEigen3(Mat3::Identity() * 2.0);
  EXPECT_LT((e.values - Vec3(2, 2, 2)).norm(), 1e-12);
  const SymEigen3 z = SymmetricEigen3(Mat3::Zero());
  EXPECT_LT(z.values.norm(), 1e-15);
  EXPECT_NEAR(z.min_vector.norm(), 1.0, 1e-12);
}

TEST(NormalCov, VanishesAtTrueRotationUnderPureRotation) {
  std::mt19937_64 rng(2);
  const Rot3 r = Exp(Vec3(0.05, -0.1, 0.02));
  const CorrSet c = PureRotationPairs(r, 50, rng);
  EXPECT_LT(ComputeNormalCov(r, c).lambda_min, 1e-20);
  EXPECT_GT(NormalCovMinEigenvalue(Exp(Vec3(0.06, -0.1, 0.02)).matrix(), c),
            1e-8);
  EXPECT_ROTVO_ERROR(ComputeNormalCov(r, {}), ErrorCode::kInvalidArgument);
}

TEST(NormalCov, MatchesExplicitSum) {
  std::mt19937_64 rng(3);
  const Rot3 r = Exp(Vec3(0.2, 0.1, -0.1));
  const CorrSet c = PureRotationPairs(Rot3::Identity(), 20, rng);
  Mat3 m = Mat3::Zero();
  for (const auto& p : c) {
    const Vec3 n = p.f_prime.cross(r.matrix() * p.f);
    m += n * n.transpose();
  }
  EXPECT_LT((ComputeNormalCov(r, c).m - m).norm(), 1e-14);
}

TEST(SolveRelRot, RecoversRotationFromNearbyStart) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Rot3 r = Exp(RandomUnit(rng) * 0.3);
    const CorrSet c = PureRotationPairs(r, 40, rng);
    const auto s = SolveRelRot(c, r * Exp(RandomUnit(rng) * 0.05));
    // Without baseline the smallest eigenvalue is quadratic in the error and
    // the finite-difference derivatives resolve it to about 1e-5 rad.
    EXPECT_LT(GeodesicAngle(s.rotation, r), 2e-5);
    EXPECT_TRUE(s.converged);
  }
}

TEST(SolveRelRot, RecoversRotationWithTranslation) {
  SynthSpec spec;
  spec.n_points = 100;
  const Trajectory t = GenerateTrajectory(spec);
  const CorrSet c = GeneratePair(spec, t[10], t[13], 7, nullptr);
  const Rot3 truth =
      RelRotFromEdgeRotation(Relative(t[10].orientation, t[13].orientation));
  const auto s = SolveRelRot(c, Rot3::Identity());
  EXPECT_LT(GeodesicAngle(s.rotation, truth), 1e-7);
  EXPECT_LT(s.lambda_min, 1e-15);
}

TEST(SolveRelRot, NeedsFiveCorrespondences) {
  std::mt19937_64 rng(5);
  const CorrSet c = PureRotationPairs(Rot3::Identity(), 4, rng);
  EXPECT_ROTVO_ERROR(SolveRelRot(c, Rot3::Identity()),
                     ErrorCode::kInsufficientCorrespondences);
}

TEST(EpipolarResidual, IsAngleToEpipolarPlane) {
  const Vec3 t(1, 0, 0);
  const BearingPair in_plane{Vec3(0, 0, 1), Vec3(0.6, 0, 0.8)};
  EXPECT_NEAR(EpipolarResidual(Mat3::Identity(), t, in_plane), 0.0, 1e-15);
  const double a = 0.01;
  const BearingPair off{Vec3(0, 0, 1), Vec3(0, std::sin(a), std::cos(a))};
  EXPECT_NEAR(EpipolarResidual(Mat3::Identity(), t, off), a, 1e-12);
  // Plane undefined when R f is parallel to the translation direction.
  const BearingPair degenerate{Vec3(1, 0, 0), Vec3(0, 0, 1)};
  EXPECT_EQ(EpipolarResidual(Mat3::Identity(), t, degenerate), 0.0);
}

TEST(RansacRelRot, SeparatesInliersFromOutliers) {
  SynthSpec spec;
  spec.n_points = 200;
  spec.bearing_noise = DegToRad(0.1);
  spec.outlier_frac = 0.3;
  const Trajectory t = GenerateTrajectory(spec);
  std::vector<bool> mask;
  const CorrSet c = GeneratePair(spec, t[40], t[42], 11, &mask);
  const Rot3 truth =
      RelRotFromEdgeRotation(Relative(t[40].orientation, t[42].orientation));
  const auto r = RansacRelRot(c, Rot3::Identity());
  EXPECT_LT(RadToDeg(GeodesicAngle(r.rotation, truth)), 0.2);
  int tp = 0;
  for (int i : r.inliers) tp += mask[i] ? 1 : 0;
  const int n_true = static_cast<int>(std::count(mask.begin(), mask.end(), true));
  EXPECT_GE(tp, 0.95 * r.inliers.size());
  EXPECT_GE(tp, 0.9 * n_true);
  EXPECT_TRUE(std::is_sorted(r.inliers.begin(), r.inliers.end()));
}

TEST(RansacRelRot, DeterministicForSeed) {
  SynthSpec spec;
  spec.bearing_noise = DegToRad(0.1);
  spec.outlier_frac = 0.2;
  const Trajectory t = GenerateTrajectory(spec);
  const CorrSet c = GeneratePair(spec, t[5], t[8], 3, nullptr);
  RelRotConfig cfg;
  cfg.seed = 99;
  const auto a = RansacRelRot(c, Rot3::Identity(), cfg);
  const auto b = RansacRelRot(c, Rot3::Identity(), cfg);
  EXPECT_EQ(a.rotation, b.rotation);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.hypotheses, b.hypotheses);
}

TEST(RansacRelRot, HandlesPureRotation) {
  std::mt19937_64 rng(6);
  const Rot3 r = Exp(Vec3(0, DegToRad(2.0), 0));
  const CorrSet c = PureRotationPairs(r, 100, rng);
  const auto res = RansacRelRot(c, Rot3::Identity());
  EXPECT_LT(GeodesicAngle(res.rotation, r), 2e-5);
  EXPECT_EQ(res.inliers.size(), c.size());
}

TEST(RansacRelRot, Errors) {
  std::mt19937_64 rng(7);
  EXPECT_ROTVO_ERROR(
      RansacRelRot(PureRotationPairs(Rot3::Identity(), 4, rng), Rot3()),
      ErrorCode::kInsufficientCorrespondences);
}

TEST(RelRotConvention, EdgeIsTransposeOfRelRot) {
  const Rot3 rj = Exp(Vec3(0.1, 0.2, 0.3));
  const Rot3 rk = Exp(Vec3(-0.2, 0.1, 0.0));
  const Rot3 rel = RelRotFromEdgeRotation(Relative(rj, rk));
  // rel maps frame-j bearings into frame k: R_k^T R_j.
  EXPECT_LT((rel.matrix() - rk.matrix().transpose() * rj.matrix()).norm(),
            1e-12);
  EXPECT_EQ(EdgeRotationFromRelRot(rel), Relative(rj, rk));
}

}  // namespace
}  // namespace rotvo
