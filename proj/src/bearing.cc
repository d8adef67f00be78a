#include "rotvo/bearing.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {

Intrinsics Intrinsics::Make(double fx, double fy, double cx, double cy) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    Throw(ErrorCode::kInvalidArgument,
          "intrinsics require finite values with fx > 0 and fy > 0");
  }
  return Intrinsics{fx, fy, cx, cy};
}

BearingVec PixelToBearing(double u, double v, const Intrinsics& k) {
  const Vec3 x((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  return x / x.norm();
}

Intrinsics ReadIntrinsics(const std::string& path) {
  LineReader reader(path);
  std::vector<double> values;
  while (reader.Next()) {
    if (!values.empty()) {
      reader.Fail("intrinsics file must contain a single line 'fx fy cx cy'");
    }
    values = reader.Numbers();
    if (values.size() != 4) {
      reader.Fail("expected 4 values 'fx fy cx cy'");
    }
  }
  if (values.empty()) {
    Throw(ErrorCode::kFormat, path + ": empty intrinsics file");
  }
  try {
    return Intrinsics::Make(values[0], values[1], values[2], values[3]);
  } catch (const Error& e) {
    reader.Fail(e.what());
  }
}

}  // namespace rotvo
