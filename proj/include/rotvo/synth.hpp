#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rotvo/dataset.hpp"
#include "rotvo/trajectory.hpp"
#include "rotvo/viewgraph.hpp"

namespace rotvo {

enum class SynthMotion {
  // Closed square course of straights and quarter-circle turns with a small
  // pitch/roll wobble. Returns to its start after n_frames steps.
  kDriveLoop,
  // Fixed position, constant yaw rate about the camera y axis.
  kPureRotation,
  // Square course whose corners are turned on the spot (zero baseline).
  kMixed,
};

const char* SynthMotionName(SynthMotion m);

struct SynthSpec {
  int n_frames = 200;
  SynthMotion motion = SynthMotion::kDriveLoop;
  double step = 1.0;                // meters per frame
  double yaw_rate = 0.017453292519943295;  // pure rotation, radians/frame
  double wobble = 0.0087266462599716477;   // drive loop, radians amplitude
  int f_window = 4;                 // pairs (k - d, k) for d = 1..f_window
  int n_points = 200;
  double half_fov = 0.78539816339744831;  // radians
  double min_depth = 4.0;
  double max_depth = 60.0;
  double bearing_noise = 0.0;       // radians, std of the perturbation angle
  double outlier_frac = 0.0;        // per correspondence
  double rel_rot_noise = 0.0;       // radians, per-axis std (graphs only)
  int n_outlier_edges = 0;          // graphs only
  std::vector<std::pair<FrameId, FrameId>> loop_pairs;
  uint64_t seed = 0;

  // Throws kInvalidArgument on out-of-range fields.
  void Validate() const;
};

// Ground truth with positions. Frame 0 is at the identity and the origin.
Trajectory GenerateTrajectory(const SynthSpec& spec);

struct SynthDataset {
  Dataset data;
  Trajectory truth;
  // True inlier flag per correspondence, for window pairs and loop pairs.
  std::map<std::pair<FrameId, FrameId>, std::vector<bool>> inlier_masks;
};

// Samples points seen by both frames of every window and loop pair. When a
// pair cannot collect n_points covisible points the field of view is widened
// and the pair regenerated; kInvalidArgument after 10 attempts.
SynthDataset GenerateDataset(const SynthSpec& spec);
CorrSet GeneratePair(const SynthSpec& spec, const TrajectoryEntry& a,
                     const TrajectoryEntry& b, uint64_t pair_seed,
                     std::vector<bool>* inlier_mask);

// Creates `dir` and writes matches.txt, loops.txt, truth.txt (with
// positions) and inliers.txt.
void WriteSynthDataset(const std::string& dir, const SynthDataset& s);

struct SynthGraph {
  ViewGraph graph;
  Trajectory truth;
  std::vector<std::pair<FrameId, FrameId>> outlier_edges;  // ascending
};

// Window and loop edges equal to truth * exp(noise); n_outlier_edges window
// edges are replaced by random rotations. Nodes start from the noisy chain.
SynthGraph GenerateRotGraph(const SynthSpec& spec);

// Writes graph.txt (view-graph dump), truth.txt and outlier_edges.txt.
void WriteSynthGraph(const std::string& dir, const SynthGraph& g);

}  // namespace rotvo
