#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotvo/bearing.hpp"
#include "rotvo/loopclose.hpp"
#include "rotvo/relrot.hpp"

namespace rotvo {

// Correspondences for a sequence of frames 0 .. num_frames - 1, already
// converted to bearings.
struct Dataset {
  FrameId num_frames = 0;
  std::map<std::pair<FrameId, FrameId>, CorrSet> pairs;   // keyed by (j, k)
  std::map<FrameId, std::vector<LoopCandidate>> loops;     // keyed by k
};

// Reads a dataset directory:
//   intrinsics.txt  optional, "fx fy cx cy"; required by pixel rows
//   matches.txt     optional "FRAMES n" line, then blocks "PAIR j k" with
//                   rows "u v u' v'" or "BPAIR j k" with rows
//                   "fx fy fz fx' fy' fz'"
//   loops.txt       optional, blocks "LOOP j k"; 4-value rows are pixels,
//                   6-value rows bearings
// Without a FRAMES line the frame count is one past the largest id used.
// Bearing rows must be unit length to 1e-6 and point into z > 0.
Dataset ReadDataset(const std::string& dir);

// Writes matches.txt (and loops.txt when there are candidates) in the bearing
// form with 17 significant digits. The directory must exist.
void WriteDataset(const std::string& dir, const Dataset& d);

}  // namespace rotvo
