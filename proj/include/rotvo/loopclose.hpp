#pragma once

#include <optional>
#include <span>

#include "rotvo/relrot.hpp"
#include "rotvo/rotavg.hpp"
#include "rotvo/viewgraph.hpp"

namespace rotvo {

struct LoopCandidate {
  FrameId j = 0;
  FrameId k = 0;  // the current frame
  CorrSet corr;
};

struct LoopConfig {
  int theta_matches = 100;
  int f_window = 4;
  RelRotConfig relrot;
};

// Geometric validation of a loop candidate: RANSAC relative rotation warm
// started from the current estimates, accepted iff the inlier count exceeds
// theta_matches. Throws kInvalidArgument for a malformed candidate (j >= k,
// k - j <= f_window, or an endpoint missing from the graph).
std::optional<Edge> ValidateLoop(const ViewGraph& g, const LoopCandidate& cand,
                                 const LoopConfig& cfg);

// Inserts the loop edges and re-averages the whole graph once. Returns the
// number of edges that changed the graph; when none did the orientations are
// left untouched and `report` is not written.
int CloseLoops(ViewGraph& g, std::span<const Edge> edges,
               const IrlsConfig& cfg, IrlsReport* report = nullptr);

}  // namespace rotvo
