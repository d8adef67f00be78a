#include "rotvo/so3.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>

#include "rotvo/error.hpp"

namespace rotvo {

Rot3 Rot3::Normalized(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  bool flip = w < 0.0;
  if (w == 0.0) {
    if (x != 0.0) {
      flip = x < 0.0;
    } else if (y != 0.0) {
      flip = y < 0.0;
    } else {
      flip = z < 0.0;
    }
  }
  if (flip) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  // Canonicalize negative zeros so formatting is byte-stable.
  return Rot3(w + 0.0, x + 0.0, y + 0.0, z + 0.0);
}

Rot3 Rot3::FromQuaternion(double w, double x, double y, double z) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) ||
      !std::isfinite(z)) {
    Throw(ErrorCode::kInvalidArgument, "quaternion has non-finite component");
  }
  if (w * w + x * x + y * y + z * z == 0.0) {
    Throw(ErrorCode::kInvalidArgument, "quaternion has zero norm");
  }
  return Normalized(w, x, y, z);
}

Rot3 Rot3::FromMatrix(const Mat3& m) {
  if (!m.allFinite()) {
    Throw(ErrorCode::kInvalidArgument, "rotation matrix has non-finite entry");
  }
  if (m.determinant() <= 0.0) {
    Throw(ErrorCode::kInvalidArgument,
          "rotation matrix has non-positive determinant");
  }
  // Orthonormalize first so near-rotations from text files are projected.
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  const Eigen::Quaterniond q(r);
  return Normalized(q.w(), q.x(), q.y(), q.z());
}

Mat3 Rot3::matrix() const {
  return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

Vec3 Rot3::Rotate(const Vec3& v) const {
  return Eigen::Quaterniond(w_, x_, y_, z_) * v;
}

Rot3 Rot3::inverse() const { return Normalized(w_, -x_, -y_, -z_); }

Rot3 Rot3::operator*(const Rot3& b) const {
  return Normalized(w_ * b.w_ - x_ * b.x_ - y_ * b.y_ - z_ * b.z_,
                    w_ * b.x_ + x_ * b.w_ + y_ * b.z_ - z_ * b.y_,
                    w_ * b.y_ - x_ * b.z_ + y_ * b.w_ + z_ * b.x_,
                    w_ * b.z_ + x_ * b.y_ - y_ * b.x_ + z_ * b.w_);
}

Rot3 Exp(const Vec3& omega) {
  if (!omega.allFinite()) {
    Throw(ErrorCode::kInvalidArgument, "exp: non-finite tangent vector");
  }
  const double theta = omega.norm();
  if (theta < so3::kSmallAngle) {
    const double t2 = theta * theta;
    const double s = 0.5 * (1.0 - t2 / 24.0);
    return Rot3::FromQuaternion(1.0 - t2 / 8.0, s * omega.x(), s * omega.y(),
                                s * omega.z());
  }
  const double s = std::sin(0.5 * theta) / theta;
  return Rot3::FromQuaternion(std::cos(0.5 * theta), s * omega.x(),
                              s * omega.y(), s * omega.z());
}

Vec3 Log(const Rot3& r) {
  const Vec3 v(r.x(), r.y(), r.z());
  const double vn = v.norm();
  if (vn == 0.0) return Vec3::Zero();
  if (r.w() == 0.0) {
    // Angle exactly pi: axis from the largest diagonal element.
    const Mat3 m = r.matrix();
    int i = 0;
    m.diagonal().maxCoeff(&i);
    Vec3 axis = 0.5 * (m.col(i) + Mat3::Identity().col(i));
    axis /= axis.norm();
    if (axis(i) < 0.0) axis = -axis;
    return M_PI * axis;
  }
  if (vn < 0.5 * so3::kSmallAngle) {
    return (2.0 / r.w()) * v;
  }
  return (2.0 * std::atan2(vn, r.w()) / vn) * v;
}

double GeodesicAngle(const Rot3& a, const Rot3& b) {
  const Rot3 d = a.inverse() * b;
  const double vn = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
  return 2.0 * std::atan2(vn, std::abs(d.w()));
}

Mat3 Hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

std::string FormatQuaternion(const Rot3& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g", r.w(), r.x(),
                r.y(), r.z());
  return buf;
}

}  // namespace rotvo
