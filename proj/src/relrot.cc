#include "rotvo/relrot.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rotvo/error.hpp"

namespace rotvo {
namespace {

// Eigenvalues of a symmetric 3x3 matrix, ascending.
Vec3 SymmetricEigenvalues3(const Mat3& a) {
  const double p1 =
      a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  if (p1 == 0.0) {
    Vec3 d = a.diagonal();
    std::sort(d.data(), d.data() + 3);
    return d;
  }
  const double d0 = a(0, 0) - q;
  const double d1 = a(1, 1) - q;
  const double d2 = a(2, 2) - q;
  const double p = std::sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1) / 6.0);
  if (p == 0.0) return Vec3::Constant(q);
  const Mat3 b = (a - q * Mat3::Identity()) / p;
  const double r = std::clamp(0.5 * b.determinant(), -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return Vec3(lo, 3.0 * q - hi - lo, hi);
}

void CanonicalSign(Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (v(i) != 0.0) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

// Null vector of (a - lambda I) from the best-conditioned row cross product.
// Returns false when the matrix has rank <= 1.
bool NullVector(const Mat3& a, double lambda, Vec3* out) {
  const Mat3 s = a - lambda * Mat3::Identity();
  const Vec3 c[3] = {s.row(0).cross(s.row(1)), s.row(0).cross(s.row(2)),
                     s.row(1).cross(s.row(2))};
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (c[i].squaredNorm() > c[best].squaredNorm()) best = i;
  }
  const double scale = s.squaredNorm();
  const double n = c[best].norm();
  if (scale == 0.0 || n <= 1e-12 * scale) return false;
  *out = c[best] / n;
  return true;
}

Vec3 AnyOrthogonal(const Vec3& v) {
  int i = 0;
  v.cwiseAbs().minCoeff(&i);
  Vec3 axis = Vec3::Zero();
  axis(i) = 1.0;
  const Vec3 o = v.cross(axis);
  return o / o.norm();
}

}  // namespace

SymEigen3 SymmetricEigen3(const Mat3& m) {
  SymEigen3 out;
  out.values = SymmetricEigenvalues3(m);
  Vec3 v;
  if (NullVector(m, out.values(0), &v)) {
    out.min_vector = v;
  } else if (NullVector(m, out.values(2), &v)) {
    // Smallest eigenvalue is repeated; any vector orthogonal to the top
    // eigenvector spans its eigenspace.
    out.min_vector = AnyOrthogonal(v);
  } else {
    out.min_vector = Vec3::UnitX();
  }
  CanonicalSign(out.min_vector);
  return out;
}

double NormalCovMinEigenvalue(const Mat3& r, std::span<const BearingPair> c) {
  Mat3 m = Mat3::Zero();
  for (const BearingPair& p : c) {
    const Vec3 n = EpipolarNormal(r, p);
    m.noalias() += n * n.transpose();
  }
  return SymmetricEigenvalues3(m)(0);
}

NormalCov ComputeNormalCov(const Rot3& r, std::span<const BearingPair> c) {
  if (c.empty()) {
    Throw(ErrorCode::kInvalidArgument, "normal covariance of an empty set");
  }
  const Mat3 rm = r.matrix();
  NormalCov out;
  out.m.setZero();
  for (const BearingPair& p : c) {
    const Vec3 n = EpipolarNormal(rm, p);
    out.m.noalias() += n * n.transpose();
  }
  // Symmetric by construction up to rounding; mirror the upper triangle.
  out.m = out.m.selfadjointView<Eigen::Upper>();
  const SymEigen3 eig = SymmetricEigen3(out.m);
  out.lambda_min = std::max(0.0, eig.values(0));
  out.e_min = eig.min_vector;
  return out;
}

RelRotSolve SolveRelRot(std::span<const BearingPair> c, const Rot3& init,
                        const RelRotConfig& cfg) {
  if (c.size() < 5) {
    Throw(ErrorCode::kInsufficientCorrespondences,
          "relative rotation needs at least 5 correspondences, got " +
              std::to_string(c.size()));
  }
  // Second differences need a larger step than the gradient to stay clear
  // of cancellation.
  constexpr double kHessStep = 1e-4;

  Rot3 x = init;
  Mat3 xm = x.matrix();
  auto objective = [&](const Vec3& d) {
    return NormalCovMinEigenvalue(xm * Exp(d).matrix(), c);
  };

  double f = NormalCovMinEigenvalue(xm, c);
  double mu = -1.0;
  RelRotSolve out;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    out.iterations = iter + 1;
    Vec3 g;
    Mat3 h;
    double fp[3];
    double fm[3];
    for (int i = 0; i < 3; ++i) {
      const Vec3 e = Vec3::Unit(i);
      g(i) = (objective(cfg.fd_step * e) - objective(-cfg.fd_step * e)) /
             (2.0 * cfg.fd_step);
      fp[i] = objective(kHessStep * e);
      fm[i] = objective(-kHessStep * e);
      h(i, i) = (fp[i] - 2.0 * f + fm[i]) / (kHessStep * kHessStep);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Vec3 ei = kHessStep * Vec3::Unit(i);
        const Vec3 ej = kHessStep * Vec3::Unit(j);
        h(i, j) = h(j, i) = (objective(ei + ej) - objective(ei - ej) -
                             objective(-ei + ej) + objective(-ei - ej)) /
                            (4.0 * kHessStep * kHessStep);
      }
    }
    const double scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    if (mu < 0.0) mu = 1e-3 * scale;

    bool accepted = false;
    Vec3 step = Vec3::Zero();
    double f_new = f;
    while (mu <= 1e12 * scale) {
      const Eigen::LLT<Mat3> llt(h + mu * Mat3::Identity());
      if (llt.info() != Eigen::Success) {
        mu *= 10.0;
        continue;
      }
      step = -llt.solve(g);
      f_new = objective(step);
      if (std::isfinite(f_new) && f_new < f) {
        accepted = true;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at this resolution.
      out.converged = true;
      break;
    }
    const double decrease = f - f_new;
    x = x * Exp(step);
    xm = x.matrix();
    f = f_new;
    mu = std::max(mu / 10.0, 1e-15 * scale);
    if (step.norm() < cfg.step_tol || decrease < cfg.obj_tol) {
      out.converged = true;
      break;
    }
  }
  out.rotation = x;
  out.lambda_min = std::max(0.0, f);
  return out;
}

double EpipolarResidual(const Mat3& r, const Vec3& t_dir,
                        const BearingPair& p) {
  const Vec3 rf = r * p.f;
  const double plane = t_dir.cross(rf).norm();
  const double off = std::abs(p.f_prime.dot(t_dir.cross(rf)));
  if (plane < 1e-12) return 0.0;
  return std::asin(std::min(1.0, off / plane));
}

namespace {

// Signed angle from R f to f' inside the epipolar plane, positive towards
// t, and the angle of t itself. A point in front of both cameras has
// 0 <= phi <= phi_t.
bool InFrontWithin(const Vec3& rf, const Vec3& t, const Vec3& f_prime,
                   double tol) {
  const Vec3 m = t.cross(rf);
  if (m.norm() < 1e-12) return true;
  const Vec3 v = rf.cross(m.normalized());
  const double phi = std::atan2(f_prime.dot(v), f_prime.dot(rf));
  const double phi_t = std::atan2(t.dot(v), t.dot(rf));
  return phi >= -tol && phi <= phi_t + tol;
}

// Correspondences within `thresh` of their epipolar plane whose rays meet in
// front of the cameras (within the same angular tolerance), for the better
// of the two signs of t_dir.
std::vector<int> ScoreInliers(const Mat3& r, const Vec3& t_dir,
                              std::span<const BearingPair> c,
                              double thresh) {
  constexpr double kZeroNormal = 1e-9;
  std::vector<int> pos;
  std::vector<int> neg;
  for (size_t i = 0; i < c.size(); ++i) {
    const Vec3 rf = r * c[i].f;
    if (c[i].f_prime.cross(rf).norm() < kZeroNormal) {
      pos.push_back(static_cast<int>(i));
      neg.push_back(static_cast<int>(i));
      continue;
    }
    if (EpipolarResidual(r, t_dir, c[i]) >= thresh) continue;
    if (InFrontWithin(rf, t_dir, c[i].f_prime, thresh)) {
      pos.push_back(static_cast<int>(i));
    }
    if (InFrontWithin(rf, -t_dir, c[i].f_prime, thresh)) {
      neg.push_back(static_cast<int>(i));
    }
  }
  return pos.size() >= neg.size() ? pos : neg;
}

CorrSet Gather(std::span<const BearingPair> c, std::span<const int> idx) {
  CorrSet out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(c[i]);
  return out;
}

// Correspondences that triangulate in front of both cameras, for the better
// of the two signs of the translation direction t.
int CheiralityVotes(const Mat3& r, const Vec3& t,
                    std::span<const BearingPair> c) {
  int pos = 0;
  int neg = 0;
  for (const BearingPair& p : c) {
    const Vec3 rf = r * p.f;
    const double cs = p.f_prime.dot(rf);
    const double det = 1.0 - cs * cs;
    if (det < 1e-12) continue;
    // Least-squares depths of a f' - b R f = t.
    const double ft = p.f_prime.dot(t);
    const double rt = rf.dot(t);
    const double a = (ft - cs * rt) / det;
    const double b = (cs * ft - rt) / det;
    if (a > 0.0 && b > 0.0) {
      ++pos;
    } else if (a < 0.0 && b < 0.0) {
      ++neg;
    }
  }
  return std::max(pos, neg);
}

// R and its rotation by pi about the translation direction satisfy the same
// epipolar constraints; keep the one with more points in front of the
// cameras.
Rot3 ResolveTwistedPair(const Rot3& r, std::span<const BearingPair> c) {
  const Vec3 t = ComputeNormalCov(r, c).e_min;
  const Rot3 alt = Exp(std::numbers::pi * t) * r;
  return CheiralityVotes(alt.matrix(), t, c) > CheiralityVotes(r.matrix(), t, c)
             ? alt
             : r;
}

struct Scored {
  Rot3 rotation;
  std::vector<int> inliers;
  RelRotSolve fit;
};

// Refits on the consensus set and rescores until it stops growing.
Scored Polish(std::span<const BearingPair> c, Scored cur,
              const RelRotConfig& cfg) {
  constexpr int kMaxRounds = 4;
  for (int round = 0; round < kMaxRounds; ++round) {
    const CorrSet support = Gather(c, cur.inliers);
    RelRotSolve fit = SolveRelRot(support, cur.rotation, cfg);
    fit.rotation = ResolveTwistedPair(fit.rotation, support);
    const Vec3 t = ComputeNormalCov(fit.rotation, support).e_min;
    std::vector<int> inliers =
        ScoreInliers(fit.rotation.matrix(), t, c, cfg.inlier_thresh);
    // The first refit always replaces the sampled model.
    if (round > 0 && inliers.size() < cur.inliers.size()) break;
    const bool grew = inliers.size() > cur.inliers.size();
    cur.rotation = fit.rotation;
    cur.inliers = std::move(inliers);
    cur.fit = fit;
    if (!grew) break;
  }
  return cur;
}

int RequiredIterations(double inlier_ratio, int sample, double confidence,
                       int cap) {
  if (inlier_ratio >= 1.0) return 1;
  const double good = std::pow(inlier_ratio, sample);
  if (good <= 0.0) return cap;
  const double denom = std::log1p(-good);
  if (denom >= 0.0) return cap;
  const double n = std::ceil(std::log(1.0 - confidence) / denom);
  return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(cap)));
}

}  // namespace

RelRotResult RansacRelRot(std::span<const BearingPair> c, const Rot3& init,
                          const RelRotConfig& cfg) {
  const int n = static_cast<int>(c.size());
  const int s = cfg.min_sample;
  if (n < s) {
    Throw(ErrorCode::kInsufficientCorrespondences,
          "RANSAC needs at least " + std::to_string(s) +
              " correspondences, got " + std::to_string(n));
  }

  Scored best{init, {}, {}};
  int needed = cfg.ransac_max_iters;
  int hyp = 0;
  std::vector<int> sample(s);
  for (; hyp < needed; ++hyp) {
    std::seed_seq seq{static_cast<uint32_t>(cfg.seed),
                      static_cast<uint32_t>(cfg.seed >> 32),
                      static_cast<uint32_t>(hyp)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < s; ++i) {
      int v;
      do {
        v = pick(rng);
      } while (std::find(sample.begin(), sample.begin() + i, v) !=
               sample.begin() + i);
      sample[i] = v;
    }
    const CorrSet minimal = Gather(c, sample);
    const RelRotSolve model = SolveRelRot(minimal, init, cfg);
    const Rot3 rot = ResolveTwistedPair(model.rotation, minimal);
    const NormalCov cov = ComputeNormalCov(rot, minimal);
    std::vector<int> inliers =
        ScoreInliers(rot.matrix(), cov.e_min, c, cfg.inlier_thresh);
    if (inliers.size() > best.inliers.size()) {
      best = {rot, std::move(inliers), model};
      // Local optimization of every new best model.
      if (static_cast<int>(best.inliers.size()) >= s) {
        best = Polish(c, std::move(best), cfg);
      }
      needed = RequiredIterations(
          static_cast<double>(best.inliers.size()) / n, s, cfg.confidence,
          cfg.ransac_max_iters);
    }
  }

  if (static_cast<int>(best.inliers.size()) < s) {
    Throw(ErrorCode::kNoModel, "no rotation hypothesis gathered " +
                                   std::to_string(s) + " inliers");
  }

  RelRotResult out;
  out.hypotheses = hyp;
  out.rotation = best.rotation;
  out.inliers = std::move(best.inliers);
  out.lambda_min = best.fit.lambda_min;
  out.converged = best.fit.converged;
  return out;
}

}  // namespace rotvo
