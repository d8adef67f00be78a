#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <string>

namespace rotvo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace so3 {
// Unit-quaternion norm is restored to this tolerance after every operation.
inline constexpr double kQuatNormTol = 1e-12;
// Orthonormality and determinant tolerance of matrix(), RᵀR = I, det R = 1.
inline constexpr double kOrthonormalTol = 1e-9;
// Below this angle exp() switches to its Taylor series.
inline constexpr double kSmallAngle = 1e-8;
// log(exp(w)) = w and exp(log(R)) = R hold to this tolerance away from pi.
inline constexpr double kRoundTripTol = 1e-9;
}  // namespace so3

// A rotation in SO(3) stored as a unit quaternion (w, x, y, z) with the
// canonical sign w >= 0 (and, when w == 0, the first nonzero vector
// component positive). Two Rot3 compare equal iff their stored coefficients
// are identical.
class Rot3 {
 public:
  Rot3() = default;

  static Rot3 Identity() { return Rot3(); }
  // Normalizes and canonicalizes. Throws kInvalidArgument on non-finite or
  // zero-norm input.
  static Rot3 FromQuaternion(double w, double x, double y, double z);
  // Projects onto the nearest rotation. Throws kInvalidArgument when the
  // matrix is not finite or has non-positive determinant.
  static Rot3 FromMatrix(const Mat3& m);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Mat3 matrix() const;
  Vec3 Rotate(const Vec3& v) const;
  Rot3 inverse() const;
  Rot3 operator*(const Rot3& rhs) const;

  bool operator==(const Rot3& rhs) const = default;

 private:
  Rot3(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}
  static Rot3 Normalized(double w, double x, double y, double z);

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

// Rotation of angle |omega| about omega / |omega|.
Rot3 Exp(const Vec3& omega);
// Principal logarithm, |result| in [0, pi]. At exactly pi the axis comes from
// the largest diagonal entry of the matrix and points along its positive
// component.
Vec3 Log(const Rot3& r);

inline Rot3 Compose(const Rot3& a, const Rot3& b) { return a * b; }
inline Rot3 Inverse(const Rot3& a) { return a.inverse(); }
// inverse(a) * b, so that Compose(a, Relative(a, b)) == b.
inline Rot3 Relative(const Rot3& a, const Rot3& b) { return a.inverse() * b; }

// |log(aᵀ b)| in radians.
double GeodesicAngle(const Rot3& a, const Rot3& b);

Mat3 Hat(const Vec3& v);

// "qw qx qy qz" with 17 significant digits.
std::string FormatQuaternion(const Rot3& r);

inline double DegToRad(double deg) { return deg * 0.017453292519943295; }
inline double RadToDeg(double rad) { return rad * 57.295779513082323; }

}  // namespace rotvo
