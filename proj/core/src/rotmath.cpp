#include "gvm/rotmath.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace gvm {

Rotation Rotation::from_axis_angle(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-14) {
    return Rotation();
  }
  return Rotation(Eigen::AngleAxisd(angle, v / angle).toRotationMatrix());
}

Rotation Rotation::from_quaternion(const Quat& q) {
  Eigen::Quaterniond eq(q.w, q.x, q.y, q.z);
  eq.normalize();
  return Rotation(eq.toRotationMatrix());
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  const double ortho_err = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > tol || m.determinant() < 0.0) {
    throw NormViolation("matrix is not a rotation: orthonormality error " +
                        std::to_string(ortho_err) + ", det " + std::to_string(m.determinant()));
  }
  return Rotation(m);
}

Rotation Rotation::from_matrix_orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Rotation(r);
}

Vec3 Rotation::to_axis_angle() const {
  // Via quaternion: numerically stable near 0 and pi.
  Eigen::Quaterniond q(m_);
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;
  }
  const Vec3 vec(q.x(), q.y(), q.z());
  const double sin_half = vec.norm();
  if (sin_half < 1e-14) {
    return Vec3::Zero();
  }
  const double angle = 2.0 * std::atan2(sin_half, q.w());
  return vec * (angle / sin_half);
}

Quat Rotation::to_quaternion() const {
  Eigen::Quaterniond q(m_);
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;
  }
  return Quat{q.w(), q.x(), q.y(), q.z()};
}

double geodesic_angle(const Rotation& a, const Rotation& b) {
  const double c = ((a.matrix().transpose() * b.matrix()).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

Rotation rot_about_y(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 m;
  m << c, 0.0, s,  //
      0.0, 1.0, 0.0,  //
      -s, 0.0, c;
  return Rotation::from_matrix(m, 1e-9);
}

double yaw_between_horizontal(const Vec3& u, const Vec3& w) {
  const double un = std::hypot(u.x(), u.z());
  const double wn = std::hypot(w.x(), w.z());
  if (un <= kDegenerateHorizontalEps || wn <= kDegenerateHorizontalEps) {
    throw DegenerateHorizontalProjection(
        "horizontal projection too small: |u_xz|=" + std::to_string(un) +
        " |w_xz|=" + std::to_string(wn));
  }
  // y-component of cross(proj(u), proj(w)) against their dot product.
  const double cross_y = u.z() * w.x() - u.x() * w.z();
  const double dot = u.x() * w.x() + u.z() * w.z();
  return std::atan2(cross_y, dot);
}

}  // namespace gvm
