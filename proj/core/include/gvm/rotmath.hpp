#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gvm/errors.hpp"

namespace gvm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

// 3D rotation stored canonically as a 3x3 orthonormal matrix (det +1).
// Axis-angle and quaternion are conversion views, not the stored form,
// so long composition chains never pick up representation drift.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  // Rodrigues map; v = axis * angle, zero vector gives identity.
  static Rotation from_axis_angle(const Vec3& v);

  // Unit quaternion (w, x, y, z); input is normalized on entry.
  static Rotation from_quaternion(const Quat& q);

  // Validates orthonormality and det sign within `tol`; throws NormViolation.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-6);

  // Projects an arbitrary (near-)rotation onto SO(3) via polar decomposition.
  static Rotation from_matrix_orthonormalized(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Vec3 to_axis_angle() const;
  Quat to_quaternion() const;

  Rotation inverse() const { return Rotation(m_.transpose().eval()); }

  Rotation operator*(const Rotation& rhs) const { return Rotation((m_ * rhs.m_).eval()); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  bool approx_equal(const Rotation& other, double tol = 1e-9) const {
    return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

// Geodesic distance on SO(3): arccos((trace(a^T b) - 1) / 2), in [0, pi].
double geodesic_angle(const Rotation& a, const Rotation& b);

// Rotation about +y by theta; convention: positive theta rotates +z toward +x.
// (0,1,0) is fixed exactly.
Rotation rot_about_y(double theta);

// Signed angle about +y between the xz-plane projections of u and w, i.e. the
// theta with rot_about_y(theta) * proj(u) == proj(w). Throws
// DegenerateHorizontalProjection when either projection norm <= 1e-6.
double yaw_between_horizontal(const Vec3& u, const Vec3& w);

inline constexpr double kDegenerateHorizontalEps = 1e-6;

}  // namespace gvm
