#pragma once

#include <optional>
#include <vector>

#include "rotvo/trajectory.hpp"

namespace rotvo {

// Ground truth and estimate restricted to their common frame ids, sorted by
// id. Index steps in this sequence are the "Delta" of the relative errors.
struct JoinedTrajectories {
  std::vector<FrameId> ids;
  std::vector<Rot3> truth;
  std::vector<Rot3> estimate;
  std::vector<std::optional<Vec3>> truth_position;

  size_t size() const { return ids.size(); }
};

// Throws kInvalidArgument on duplicate frame ids in either input.
JoinedTrajectories Join(const Trajectory& truth, const Trajectory& estimate);

// Angle of (R̂_iᵀ R̂_{i+Δ})ᵀ (R_iᵀ R_{i+Δ}) for joined indices i and i + delta.
double RpeResidual(const JoinedTrajectories& jt, size_t i, size_t delta);
// Same, addressed by frame id; throws kInvalidArgument when frame `id` or the
// frame `delta` joined steps after it is missing.
double RpeResidual(const Trajectory& truth, const Trajectory& estimate,
                   FrameId id, size_t delta);

// RMSE of the residuals over the n - delta pairs at a fixed step.
double RpeRmse(const JoinedTrajectories& jt, size_t delta);
// RMSE(delta) for delta = 1 .. n - 1.
std::vector<double> RpeCurve(const JoinedTrajectories& jt);

// Both throw kInvalidArgument with fewer than two common frames.
double Rpe1(const Trajectory& truth, const Trajectory& estimate);
// (1/n) * sum_{delta=1}^{n-1} RMSE(delta); the empty delta = n term is
// skipped.
double RpeN(const Trajectory& truth, const Trajectory& estimate);

inline const std::vector<double> kDefaultSegmentLengths = {
    100, 200, 300, 400, 500, 600, 700, 800};

struct RotationErrorSummary {
  double mean = 0.0;            // radians
  double mean_per_meter = 0.0;  // radians per meter of segment length
  size_t pairs = 0;
};

// Average rotation error over frame pairs separated by the given path
// lengths along the ground-truth positions: for every start frame i and
// length d, the partner is the first frame whose cumulative distance from i
// exceeds d. Throws kUnsupported without positions and kEmptyPairSet when no
// pair exists.
RotationErrorSummary AverageRotationError(
    const Trajectory& truth, const Trajectory& estimate,
    const std::vector<double>& lengths = kDefaultSegmentLengths);

}  // namespace rotvo
