#pragma once

#include <span>
#include <vector>

#include "gvm/rotmath.hpp"

namespace gvm {

// Per-frame gravity-view frame: y-axis along gravity, x-axis perpendicular to
// gravity and the camera view direction, z-axis by the right-hand rule. All
// axes are expressed in camera coordinates; r_c2gv has the axes as rows and
// maps camera coordinates into the gravity-view frame.
struct GvBasis {
  Vec3 x_axis;
  Vec3 y_axis;
  Vec3 z_axis;
  Rotation r_c2gv;
};

inline const Vec3 kViewDir(0.0, 0.0, 1.0);

// Builds the gravity-view frame for one image. `gravity_c` is the gravity
// direction in camera coordinates (normalized on entry). When gravity is
// within 1e-6 of parallel to the view direction, the x-axis falls back to the
// camera x-axis projected into the horizontal plane.
GvBasis build_gv_basis(const Vec3& gravity_c, const Vec3& view = kViewDir);

// Re-expresses a camera-frame orientation in the gravity-view frame:
// r_c2gv * gamma_c.
Rotation orientation_to_gv(const Rotation& gamma_c, const GvBasis& basis);

// Yaw-only rotation mapping frame-t gravity-view coordinates into the
// previous frame's gravity-view coordinates.
//
// `r_delta` maps camera-(t-1) coordinates into camera-t coordinates,
// r_delta = R_w2c^t * (R_w2c^{t-1})^-1. The camera-to-GV map is recovered
// from the per-frame orientations as gamma_gv * gamma_c^-1; the previous
// camera's view ray is carried into frame t by r_delta and both view rays are
// compared in the frame-t GV system. The result fixes (0,1,0) exactly, so a
// rollout of these factors can never tilt the gravity axis.
//
// Throws DegenerateHorizontalProjection when a view ray is within 1e-6 of
// vertical in the GV frame.
Rotation relative_gv_rotation(const Rotation& gamma_c, const Rotation& gamma_gv,
                              const Rotation& r_delta);

// Per-frame gravity-view orientations plus the relative yaw track linking
// consecutive frames (entry 0 is the identity).
struct GvOrientationTrack {
  std::vector<Rotation> gamma_gv;
  std::vector<Rotation> r_delta_gv;
};

// Computes the relative yaw track for a whole sequence. Throws LengthMismatch
// when the inputs disagree in length; degenerate frames are reported with
// their index.
std::vector<Rotation> gv_relative_track(std::span<const Rotation> gamma_c,
                                        std::span<const Rotation> gamma_gv,
                                        std::span<const Rotation> r_delta);

GvOrientationTrack make_gv_orientation_track(std::span<const Rotation> gamma_c,
                                             std::span<const Rotation> gamma_gv,
                                             std::span<const Rotation> r_delta);

}  // namespace gvm
