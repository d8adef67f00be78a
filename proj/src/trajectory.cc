#include "rotvo/trajectory.hpp"

#include <cstdio>
#include <sstream>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {

Trajectory ReadTrajectory(const std::string& path) {
  LineReader reader(path);
  Trajectory out;
  enum class Format { kUnknown, kQuaternion, kKitti } format = Format::kUnknown;
  FrameId row = 0;
  while (reader.Next()) {
    const size_t n = reader.tokens().size();
    if (format == Format::kUnknown) {
      if (n == 12) {
        format = Format::kKitti;
      } else if (n == 5 || n == 8) {
        format = Format::kQuaternion;
      } else {
        reader.Fail("expected 'frame_id qw qx qy qz [tx ty tz]' or 12 KITTI "
                    "pose values, got " + std::to_string(n) + " values");
      }
    }
    TrajectoryEntry e;
    try {
      if (format == Format::kKitti) {
        if (n != 12) reader.Fail("KITTI rows need 12 values");
        const std::vector<double> v = reader.Numbers();
        Mat3 r;
        r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
        e.id = row;
        e.orientation = Rot3::FromMatrix(r);
        e.position = Vec3(v[3], v[7], v[11]);
      } else {
        if (n != 5 && n != 8) {
          reader.Fail("rows need 'frame_id qw qx qy qz [tx ty tz]'");
        }
        e.id = reader.Integer(0);
        e.orientation =
            Rot3::FromQuaternion(reader.Number(1), reader.Number(2),
                                 reader.Number(3), reader.Number(4));
        if (n == 8) {
          e.position = Vec3(reader.Number(5), reader.Number(6),
                            reader.Number(7));
        }
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kFormat) throw;
      reader.Fail(err.what());
    }
    out.push_back(e);
    ++row;
  }
  return out;
}

std::string FormatTrajectory(const Trajectory& t, bool with_positions) {
  bool positions = with_positions;
  for (const auto& e : t) positions = positions && e.position.has_value();
  std::ostringstream out;
  char buf[96];
  for (const auto& e : t) {
    out << e.id << ' ' << FormatQuaternion(e.orientation);
    if (positions) {
      for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof(buf), " %.17g", (*e.position)(i));
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

void WriteTrajectory(const std::string& path, const Trajectory& t,
                     bool with_positions) {
  WriteFileAtomically(path, FormatTrajectory(t, with_positions));
}

}  // namespace rotvo
