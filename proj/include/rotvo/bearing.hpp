#pragma once

#include <string>

#include "rotvo/so3.hpp"

namespace rotvo {

// Pinhole intrinsics in pixels. Construct through Make() to enforce
// fx > 0 and fy > 0.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  static Intrinsics Make(double fx, double fy, double cx, double cy);
};

// Unit bearing vector pointing into the half-space z > 0.
using BearingVec = Vec3;

BearingVec PixelToBearing(double u, double v, const Intrinsics& k);

// Reads the single-line "fx fy cx cy" file. Errors carry path:line.
Intrinsics ReadIntrinsics(const std::string& path);

}  // namespace rotvo
