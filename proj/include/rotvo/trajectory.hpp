#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotvo/so3.hpp"
#include "rotvo/viewgraph.hpp"

namespace rotvo {

struct TrajectoryEntry {
  FrameId id = 0;
  Rot3 orientation;               // camera-to-world
  std::optional<Vec3> position;   // meters, world frame
};

// Also the ground-truth container; positions are needed only by the
// distance-based rotation error.
using Trajectory = std::vector<TrajectoryEntry>;

// Reads either "frame_id qw qx qy qz [tx ty tz]" rows or the KITTI pose
// format (12 floats per row, row-major [R|t], frame id = row index). The
// format is detected from the first row.
Trajectory ReadTrajectory(const std::string& path);

// "frame_id qw qx qy qz" rows, plus " tx ty tz" when `with_positions` and
// every entry carries a position. 17 significant digits.
std::string FormatTrajectory(const Trajectory& t, bool with_positions = false);
void WriteTrajectory(const std::string& path, const Trajectory& t,
                     bool with_positions = false);

}  // namespace rotvo
