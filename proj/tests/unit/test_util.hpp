#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "rotvo/so3.hpp"

namespace rotvo::testing {

// Removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rotvo_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rotation angle read off the matrix; used as an oracle that does not go
// through the quaternion code.
inline double MatrixAngle(const Mat3& r) {
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * v.norm(), 0.5 * (r.trace() - 1.0));
}

// Rodrigues' formula.
inline Mat3 Rodrigues(const Vec3& w) {
  const double t = w.norm();
  if (t == 0.0) return Mat3::Identity();
  const Vec3 a = w / t;
  Mat3 k;
  k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return Mat3::Identity() + std::sin(t) * k + (1.0 - std::cos(t)) * k * k;
}

inline Vec3 RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

inline Rot3 RandomRotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  return Exp(RandomUnit(rng) * u(rng));
}

}  // namespace rotvo::testing

#define EXPECT_ROTVO_ERROR(stmt, expected_code)                      \
  do {                                                               \
    try {                                                            \
      stmt;                                                          \
      ADD_FAILURE() << "expected rotvo::Error from " #stmt;          \
    } catch (const ::rotvo::Error& e) {                              \
      EXPECT_EQ(e.code(), expected_code) << e.what();                \
    }                                                                \
  } while (0)
