#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rotvo/dataset.hpp"
#include "rotvo/loopclose.hpp"
#include "rotvo/relrot.hpp"
#include "rotvo/rotavg.hpp"
#include "rotvo/trajectory.hpp"
#include "rotvo/viewgraph.hpp"

namespace rotvo {

enum class PipelineMode {
  kIncremental,
  // Orientations composed along the newest accepted edge; no averaging and
  // no loop closure.
  kChaining,
  // Incremental bookkeeping, but the whole graph is re-averaged every frame.
  kGlobalEachFrame,
};

const char* PipelineModeName(PipelineMode mode);
// Accepts "incremental", "chaining" and "global-each-frame".
PipelineMode ParsePipelineMode(const std::string& name);

struct PipelineConfig {
  int f_window = 4;
  int r_window = 10;
  int theta_matches = 100;
  RelRotConfig relrot;
  IrlsConfig irls;
  PipelineMode mode = PipelineMode::kIncremental;
  bool loops = true;
  uint64_t seed = 0;

  // Throws kInvalidArgument unless 1 <= f_window <= r_window and
  // theta_matches >= relrot.min_sample.
  void Validate() const;
};

struct PairView {
  FrameId j = 0;
  std::span<const BearingPair> corr;
};

struct FrameRecord {
  FrameId id = 0;
  std::vector<PairView> pairs;  // pairs against earlier frames
  std::span<const LoopCandidate> loops;
};

struct StepReport {
  FrameId id = 0;
  bool skipped = false;
  // The new node reached the fixed part of the graph and the window solve
  // ran (or nothing needed solving).
  bool connected = false;
  int pairs_tried = 0;
  int edges_added = 0;
  int min_inliers = 0;
  int max_inliers = 0;
  double mean_inliers = 0.0;
  int loops_tried = 0;
  int loops_accepted = 0;
  // Wall-clock stage durations in microseconds.
  double relrot_us = 0.0;
  double graph_us = 0.0;
  double rotavg_us = 0.0;
  double loop_us = 0.0;
};

class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& cfg);

  // Frames must arrive with strictly increasing ids (kInvalidArgument
  // otherwise). Pairs whose j is not among the last f_window accepted frames
  // are ignored.
  StepReport ProcessFrame(const FrameRecord& rec);

  const ViewGraph& graph() const { return graph_; }
  // Current estimates of all accepted frames, in id order.
  Trajectory CurrentTrajectory() const;

 private:
  Rot3 WarmStart(FrameId j, FrameId k) const;
  uint64_t PairSeed(FrameId j, FrameId k) const;

  PipelineConfig cfg_;
  ViewGraph graph_;
  std::vector<FrameId> accepted_;
  FrameId last_input_ = -1;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<StepReport> steps;
};

// Feeds frames 0 .. num_frames - 1 through a fresh pipeline.
RunResult RunSequence(const Dataset& d, const PipelineConfig& cfg);

// "frame_id,relrot_us,graph_us,rotavg_us,loop_us" with one row per input
// frame.
std::string FormatTimingCsv(std::span<const StepReport> steps);

}  // namespace rotvo
