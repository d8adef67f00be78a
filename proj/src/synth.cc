#include "rotvo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAttempts = 10;
constexpr double kFovWidening = 0.087266462599716477;  // 5 deg per attempt
constexpr double kMaxHalfFov = 1.4835298641951802;      // 85 deg

using Rng = std::mt19937_64;

Rng MakeRng(uint64_t seed, uint64_t a, uint64_t b, uint64_t tag) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                    static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32),
                    static_cast<uint32_t>(tag)};
  return Rng(seq);
}

Rot3 AboutY(double a) { return Exp(Vec3(0.0, a, 0.0)); }

Vec3 Forward(double heading) {
  return Vec3(std::sin(heading), 0.0, std::cos(heading));
}

// Position and heading after arc length `len` along the closed course: eight
// equal segments alternating straight and quarter turn of radius 2s/pi.
void DriveLoopPose(double total, double len, Vec3* p, double* heading) {
  const double s = total / 8.0;
  const double r = 2.0 * s / kPi;
  const int seg = std::min(7, static_cast<int>(std::floor(len / s)));
  Vec3 pos = Vec3::Zero();
  for (int i = 0; i < seg; ++i) {
    const double th = (i / 2) * kPi / 2.0;
    if (i % 2 == 0) {
      pos += s * Forward(th);
    } else {
      pos += r * Vec3(std::cos(th) - std::cos(th + kPi / 2.0), 0.0,
                      std::sin(th + kPi / 2.0) - std::sin(th));
    }
  }
  const double u = len - seg * s;
  const double th0 = (seg / 2) * kPi / 2.0;
  if (seg % 2 == 0) {
    *p = pos + u * Forward(th0);
    *heading = th0;
  } else {
    const double phi = u / r;
    *p = pos + r * Vec3(std::cos(th0) - std::cos(th0 + phi), 0.0,
                        std::sin(th0 + phi) - std::sin(th0));
    *heading = th0 + phi;
  }
}

// Square of straights whose corners are quarter turns on the spot.
void MixedPose(int n, double step, int i, Vec3* p, double* heading) {
  const double t = 8.0 * i / n;
  const int seg = std::min(7, static_cast<int>(std::floor(t)));
  const double u = t - seg;
  const double s = step * n / 8.0;
  Vec3 pos = Vec3::Zero();
  for (int q = 0; q < seg; q += 2) pos += s * Forward((q / 2) * kPi / 2.0);
  const double th0 = (seg / 2) * kPi / 2.0;
  if (seg % 2 == 0) {
    *p = pos + u * s * Forward(th0);
    *heading = th0;
  } else {
    *p = pos;
    *heading = th0 + u * kPi / 2.0;
  }
}

Vec3 RandomUnit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-12) return v.normalized();
  }
}

// Rotates f about a random axis perpendicular to it by |N(0, sigma)|.
Vec3 Perturb(const Vec3& f, double sigma, Rng& rng) {
  if (sigma <= 0.0) return f;
  std::normal_distribution<double> n(0.0, sigma);
  Vec3 axis;
  do {
    const Vec3 v = RandomUnit(rng);
    axis = v - v.dot(f) * f;
  } while (axis.norm() < 1e-6);
  return Exp(axis.normalized() * std::abs(n(rng))).Rotate(f).normalized();
}

Vec3 RandomBearingInFov(double tan_fov, Rng& rng) {
  std::uniform_real_distribution<double> u(-tan_fov, tan_fov);
  const double x = u(rng);
  const double y = u(rng);
  return Vec3(x, y, 1.0).normalized();
}

bool InFov(const Vec3& x, double tan_fov) {
  return x.z() > 1e-6 && std::abs(x.x()) <= tan_fov * x.z() &&
         std::abs(x.y()) <= tan_fov * x.z();
}

// Returns false when the pair cannot collect n_points covisible points.
bool SamplePair(const SynthSpec& spec, double half_fov,
                const TrajectoryEntry& a, const TrajectoryEntry& b, Rng& rng,
                CorrSet* out) {
  const double tan_fov = std::tan(half_fov);
  std::uniform_real_distribution<double> uv(-tan_fov, tan_fov);
  std::uniform_real_distribution<double> depth(spec.min_depth, spec.max_depth);
  const Mat3 ra = a.orientation.matrix();
  const Mat3 rb = b.orientation.matrix();
  const Vec3 pa = a.position.value_or(Vec3::Zero());
  const Vec3 pb = b.position.value_or(Vec3::Zero());
  out->clear();
  const long max_tries = 100L * std::max(spec.n_points, 1);
  for (long t = 0; t < max_tries && static_cast<int>(out->size()) < spec.n_points;
       ++t) {
    const double z = depth(rng);
    const double x = uv(rng);
    const double y = uv(rng);
    const Vec3 xa(x * z, y * z, z);
    const Vec3 xb = rb.transpose() * (ra * xa + pa - pb);
    if (!InFov(xb, tan_fov)) continue;
    out->push_back({xa.normalized(), xb.normalized()});
  }
  return static_cast<int>(out->size()) == spec.n_points;
}

void CheckPair(const SynthSpec& spec, FrameId j, FrameId k) {
  if (j < 0 || j >= k || k >= spec.n_frames) {
    Throw(ErrorCode::kInvalidArgument,
          "pair (" + std::to_string(j) + ", " + std::to_string(k) +
              ") outside the sequence");
  }
}

std::string MaskLine(const std::vector<bool>& mask) {
  std::string s;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (i) s += ' ';
    s += mask[i] ? '1' : '0';
  }
  return s + "\n";
}

}  // namespace

const char* SynthMotionName(SynthMotion m) {
  switch (m) {
    case SynthMotion::kDriveLoop:
      return "drive_loop";
    case SynthMotion::kPureRotation:
      return "pure_rotation";
    case SynthMotion::kMixed:
      return "mixed";
  }
  return "unknown";
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string& m) { Throw(ErrorCode::kInvalidArgument, m); };
  if (n_frames < 0) fail("n_frames must be >= 0");
  if (!(step > 0.0)) fail("step must be > 0");
  if (f_window < 1) fail("f_window must be >= 1");
  if (n_points < 1) fail("n_points must be >= 1");
  if (!(half_fov > 0.0) || half_fov > kMaxHalfFov) {
    fail("half_fov must be in (0, 85] degrees");
  }
  if (!(min_depth > 0.0) || !(max_depth > min_depth)) {
    fail("depth range must satisfy 0 < min_depth < max_depth");
  }
  if (!(bearing_noise >= 0.0) || !(rel_rot_noise >= 0.0) ||
      !std::isfinite(yaw_rate) || !std::isfinite(wobble)) {
    fail("noise levels must be >= 0");
  }
  if (!(outlier_frac >= 0.0) || !(outlier_frac < 1.0)) {
    fail("outlier_frac must be in [0, 1)");
  }
  if (n_outlier_edges < 0) fail("n_outlier_edges must be >= 0");
  for (const auto& [j, k] : loop_pairs) {
    CheckPair(*this, j, k);
    if (k - j <= f_window) fail("loop pairs need k - j > f_window");
  }
}

Trajectory GenerateTrajectory(const SynthSpec& spec) {
  spec.Validate();
  Trajectory t;
  t.reserve(spec.n_frames);
  const double total = spec.n_frames * spec.step;
  for (int i = 0; i < spec.n_frames; ++i) {
    Vec3 p = Vec3::Zero();
    double heading = 0.0;
    Rot3 r;
    switch (spec.motion) {
      case SynthMotion::kDriveLoop: {
        const double len = i * spec.step;
        DriveLoopPose(total, len, &p, &heading);
        const double pitch = spec.wobble * std::sin(2.0 * kPi * len / 37.0);
        const double roll = 0.5 * spec.wobble * std::sin(2.0 * kPi * len / 23.0);
        r = AboutY(heading) * Exp(Vec3(pitch, 0.0, 0.0)) *
            Exp(Vec3(0.0, 0.0, roll));
        break;
      }
      case SynthMotion::kPureRotation:
        r = AboutY(spec.yaw_rate * i);
        break;
      case SynthMotion::kMixed:
        MixedPose(spec.n_frames, spec.step, i, &p, &heading);
        r = AboutY(heading);
        break;
    }
    if (i == 0) {
      r = Rot3::Identity();
      p = Vec3::Zero();
    }
    t.push_back({i, r, p});
  }
  return t;
}

CorrSet GeneratePair(const SynthSpec& spec, const TrajectoryEntry& a,
                     const TrajectoryEntry& b, uint64_t pair_seed,
                     std::vector<bool>* inlier_mask) {
  CorrSet c;
  double half_fov = spec.half_fov;
  bool ok = false;
  for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
    Rng rng = MakeRng(pair_seed, a.id, b.id, attempt);
    ok = SamplePair(spec, half_fov, a, b, rng, &c);
    if (!ok) half_fov = std::min(half_fov + kFovWidening, kMaxHalfFov);
  }
  if (!ok) {
    Throw(ErrorCode::kInvalidArgument,
          "frames " + std::to_string(a.id) + " and " + std::to_string(b.id) +
              " share too few covisible points");
  }
  Rng rng = MakeRng(pair_seed, a.id, b.id, 0x6e6f6973);
  for (auto& p : c) {
    p.f = Perturb(p.f, spec.bearing_noise, rng);
    p.f_prime = Perturb(p.f_prime, spec.bearing_noise, rng);
  }
  std::vector<bool> mask(c.size(), true);
  const size_t n_out =
      static_cast<size_t>(std::lround(spec.outlier_frac * c.size()));
  std::vector<size_t> idx(c.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  const double tan_fov = std::tan(half_fov);
  for (size_t i = 0; i < n_out; ++i) {
    c[idx[i]].f_prime = RandomBearingInFov(tan_fov, rng);
    mask[idx[i]] = false;
  }
  if (inlier_mask) *inlier_mask = std::move(mask);
  return c;
}

SynthDataset GenerateDataset(const SynthSpec& spec) {
  SynthDataset s;
  s.truth = GenerateTrajectory(spec);
  s.data.num_frames = spec.n_frames;
  for (int k = 1; k < spec.n_frames; ++k) {
    for (int d = spec.f_window; d >= 1; --d) {
      const int j = k - d;
      if (j < 0) continue;
      auto& mask = s.inlier_masks[{j, k}];
      s.data.pairs[{j, k}] =
          GeneratePair(spec, s.truth[j], s.truth[k], spec.seed, &mask);
    }
  }
  for (const auto& [j, k] : spec.loop_pairs) {
    auto& mask = s.inlier_masks[{j, k}];
    s.data.loops[k].push_back(
        {j, k, GeneratePair(spec, s.truth[j], s.truth[k], spec.seed, &mask)});
  }
  return s;
}

void WriteSynthDataset(const std::string& dir, const SynthDataset& s) {
  std::filesystem::create_directories(dir);
  WriteDataset(dir, s.data);
  WriteTrajectory((std::filesystem::path(dir) / "truth.txt").string(), s.truth,
                  true);
  std::string out;
  for (const auto& [key, mask] : s.inlier_masks) {
    const bool loop = !s.data.pairs.contains(key);
    out += std::string(loop ? "LOOP " : "PAIR ") + std::to_string(key.first) +
           " " + std::to_string(key.second) + "\n" + MaskLine(mask);
  }
  WriteFileAtomically((std::filesystem::path(dir) / "inliers.txt").string(),
                      out);
}

SynthGraph GenerateRotGraph(const SynthSpec& spec) {
  SynthGraph out;
  out.truth = GenerateTrajectory(spec);
  const int n = spec.n_frames;
  Rng rng = MakeRng(spec.seed, 0, 0, 0x67726170);
  std::normal_distribution<double> noise(0.0, spec.rel_rot_noise);
  auto noisy = [&](FrameId j, FrameId k) {
    const Rot3 rel = Relative(out.truth[j].orientation, out.truth[k].orientation);
    if (spec.rel_rot_noise <= 0.0) return rel;
    const Vec3 w(noise(rng), noise(rng), noise(rng));
    return rel * Exp(w);
  };

  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) {
    for (int d = spec.f_window; d >= 1; --d) {
      if (k - d < 0) continue;
      edges.push_back({k - d, k, noisy(k - d, k), spec.n_points, false});
    }
  }
  const size_t n_window = edges.size();
  if (static_cast<size_t>(spec.n_outlier_edges) > n_window) {
    Throw(ErrorCode::kInvalidArgument, "more outlier edges than window edges");
  }
  std::vector<size_t> idx(n_window);
  for (size_t i = 0; i < n_window; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> angle(kPi / 6.0, kPi);
  for (int i = 0; i < spec.n_outlier_edges; ++i) {
    Edge& e = edges[idx[i]];
    e.rotation = Exp(RandomUnit(rng) * angle(rng));
    out.outlier_edges.push_back({e.j, e.k});
  }
  std::sort(out.outlier_edges.begin(), out.outlier_edges.end());
  for (const auto& [j, k] : spec.loop_pairs) {
    edges.push_back({j, k, noisy(j, k), spec.n_points, true});
  }

  // Chained initialization along the consecutive edges.
  std::vector<Rot3> init(n);
  for (const Edge& e : edges) {
    if (e.k == e.j + 1) init[e.k] = init[e.j] * e.rotation;
  }
  for (int i = 0; i < n; ++i) out.graph.AddNode(i, init[i]);
  for (const Edge& e : edges) {
    out.graph.AddEdge(e.j, e.k, e.rotation, e.inlier_count, e.is_loop);
  }
  return out;
}

void WriteSynthGraph(const std::string& dir, const SynthGraph& g) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  WriteFileAtomically((fs::path(dir) / "graph.txt").string(), g.graph.Dump());
  WriteTrajectory((fs::path(dir) / "truth.txt").string(), g.truth, true);
  std::string out;
  for (const auto& [j, k] : g.outlier_edges) {
    out += std::to_string(j) + " " + std::to_string(k) + "\n";
  }
  WriteFileAtomically((fs::path(dir) / "outlier_edges.txt").string(), out);
}

}  // namespace rotvo
