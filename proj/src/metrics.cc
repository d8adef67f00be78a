#include "rotvo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rotvo/error.hpp"

namespace rotvo {
namespace {

std::map<FrameId, const TrajectoryEntry*> IndexById(const Trajectory& t,
                                                    const char* what) {
  std::map<FrameId, const TrajectoryEntry*> out;
  for (const auto& e : t) {
    if (!out.emplace(e.id, &e).second) {
      Throw(ErrorCode::kInvalidArgument, std::string("duplicate frame id ") +
                                             std::to_string(e.id) + " in " +
                                             what);
    }
  }
  return out;
}

JoinedTrajectories JoinAtLeastTwo(const Trajectory& truth,
                                  const Trajectory& estimate) {
  JoinedTrajectories jt = Join(truth, estimate);
  if (jt.size() < 2) {
    Throw(ErrorCode::kInvalidArgument,
          "relative pose error needs at least two common frames");
  }
  return jt;
}

}  // namespace

JoinedTrajectories Join(const Trajectory& truth, const Trajectory& estimate) {
  const auto gt = IndexById(truth, "ground truth");
  const auto est = IndexById(estimate, "estimate");
  JoinedTrajectories jt;
  for (const auto& [id, g] : gt) {
    const auto it = est.find(id);
    if (it == est.end()) continue;
    jt.ids.push_back(id);
    jt.truth.push_back(g->orientation);
    jt.estimate.push_back(it->second->orientation);
    jt.truth_position.push_back(g->position);
  }
  return jt;
}

double RpeResidual(const JoinedTrajectories& jt, size_t i, size_t delta) {
  const size_t j = i + delta;
  if (j >= jt.size()) {
    Throw(ErrorCode::kInvalidArgument, "relative pose error index out of range");
  }
  return GeodesicAngle(Relative(jt.truth[i], jt.truth[j]),
                       Relative(jt.estimate[i], jt.estimate[j]));
}

double RpeResidual(const Trajectory& truth, const Trajectory& estimate,
                   FrameId id, size_t delta) {
  const JoinedTrajectories jt = Join(truth, estimate);
  const auto it = std::lower_bound(jt.ids.begin(), jt.ids.end(), id);
  if (it == jt.ids.end() || *it != id) {
    Throw(ErrorCode::kInvalidArgument,
          "frame " + std::to_string(id) + " missing from truth or estimate");
  }
  return RpeResidual(jt, static_cast<size_t>(it - jt.ids.begin()), delta);
}

double RpeRmse(const JoinedTrajectories& jt, size_t delta) {
  if (delta == 0 || delta >= jt.size()) {
    Throw(ErrorCode::kInvalidArgument, "RMSE step out of range");
  }
  const size_t m = jt.size() - delta;
  double sum = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double e = RpeResidual(jt, i, delta);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(m));
}

std::vector<double> RpeCurve(const JoinedTrajectories& jt) {
  std::vector<double> out;
  for (size_t d = 1; d < jt.size(); ++d) out.push_back(RpeRmse(jt, d));
  return out;
}

double Rpe1(const Trajectory& truth, const Trajectory& estimate) {
  return RpeRmse(JoinAtLeastTwo(truth, estimate), 1);
}

double RpeN(const Trajectory& truth, const Trajectory& estimate) {
  const JoinedTrajectories jt = JoinAtLeastTwo(truth, estimate);
  double sum = 0.0;
  for (double v : RpeCurve(jt)) sum += v;
  return sum / static_cast<double>(jt.size());
}

RotationErrorSummary AverageRotationError(const Trajectory& truth,
                                          const Trajectory& estimate,
                                          const std::vector<double>& lengths) {
  const JoinedTrajectories jt = Join(truth, estimate);
  for (const auto& p : jt.truth_position) {
    if (!p) {
      Throw(ErrorCode::kUnsupported,
            "average rotation error needs ground-truth positions");
    }
  }
  std::vector<double> dist(jt.size(), 0.0);
  for (size_t i = 1; i < jt.size(); ++i) {
    dist[i] = dist[i - 1] + (*jt.truth_position[i] - *jt.truth_position[i - 1]).norm();
  }
  RotationErrorSummary out;
  double sum = 0.0;
  double sum_per_meter = 0.0;
  for (size_t i = 0; i < jt.size(); ++i) {
    for (double len : lengths) {
      const auto it = std::upper_bound(dist.begin() + i, dist.end(),
                                       dist[i] + len);
      if (it == dist.end()) continue;
      const size_t j = static_cast<size_t>(it - dist.begin());
      const double e = RpeResidual(jt, i, j - i);
      sum += e;
      sum_per_meter += e / len;
      ++out.pairs;
    }
  }
  if (out.pairs == 0) {
    Throw(ErrorCode::kEmptyPairSet,
          "trajectory too short for the requested segment lengths");
  }
  out.mean = sum / static_cast<double>(out.pairs);
  out.mean_per_meter = sum_per_meter / static_cast<double>(out.pairs);
  return out;
}

}  // namespace rotvo
