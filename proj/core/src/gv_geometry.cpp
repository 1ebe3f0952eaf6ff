#include "gvm/gv_geometry.hpp"

#include <cmath>
#include <string>

namespace gvm {

GvBasis build_gv_basis(const Vec3& gravity_c, const Vec3& view) {
  const double gnorm = gravity_c.norm();
  if (gnorm < 1e-12) {
    throw GravityParallelToView("gravity direction has zero norm");
  }
  const Vec3 y = gravity_c / gnorm;

  Vec3 x = y.cross(view);
  const double xnorm = x.norm();
  if (xnorm <= 1e-6) {
    // Gravity (anti)parallel to the view ray: anchor x on the camera x-axis,
    // projected orthogonal to gravity.
    const Vec3 ex(1.0, 0.0, 0.0);
    x = ex - ex.dot(y) * y;
    const double fnorm = x.norm();
    if (fnorm <= 1e-6) {
      throw GravityParallelToView("gravity parallel to view and to the fallback axis");
    }
    x /= fnorm;
  } else {
    x /= xnorm;
  }

  Vec3 z = x.cross(y);
  z.normalize();

  Mat3 m;
  m.row(0) = x;
  m.row(1) = y;
  m.row(2) = z;
  return GvBasis{x, y, z, Rotation::from_matrix(m, 1e-9)};
}

Rotation orientation_to_gv(const Rotation& gamma_c, const GvBasis& basis) {
  return basis.r_c2gv * gamma_c;
}

Rotation relative_gv_rotation(const Rotation& gamma_c, const Rotation& gamma_gv,
                              const Rotation& r_delta) {
  const Rotation r_c2gv = gamma_gv * gamma_c.inverse();
  const Vec3 view_curr = r_c2gv * kViewDir;
  // Previous camera's view ray, expressed in camera-t and mapped into GV_t.
  const Vec3 view_prev = r_c2gv * (r_delta * kViewDir);
  return rot_about_y(yaw_between_horizontal(view_prev, view_curr));
}

GvOrientationTrack make_gv_orientation_track(std::span<const Rotation> gamma_c,
                                             std::span<const Rotation> gamma_gv,
                                             std::span<const Rotation> r_delta) {
  GvOrientationTrack track;
  track.gamma_gv.assign(gamma_gv.begin(), gamma_gv.end());
  track.r_delta_gv = gv_relative_track(gamma_c, gamma_gv, r_delta);
  return track;
}

std::vector<Rotation> gv_relative_track(std::span<const Rotation> gamma_c,
                                        std::span<const Rotation> gamma_gv,
                                        std::span<const Rotation> r_delta) {
  if (gamma_c.size() != gamma_gv.size() || gamma_c.size() != r_delta.size()) {
    throw LengthMismatch("gv_relative_track: track lengths differ (" +
                         std::to_string(gamma_c.size()) + ", " + std::to_string(gamma_gv.size()) +
                         ", " + std::to_string(r_delta.size()) + ")");
  }
  std::vector<Rotation> out(gamma_c.size());
  for (std::size_t t = 1; t < gamma_c.size(); ++t) {
    try {
      out[t] = relative_gv_rotation(gamma_c[t], gamma_gv[t], r_delta[t]);
    } catch (const DegenerateHorizontalProjection& e) {
      throw DegenerateHorizontalProjection("frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gvm
