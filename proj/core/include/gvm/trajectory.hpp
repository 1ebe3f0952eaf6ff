#pragma once

#include <span>
#include <vector>

#include "gvm/gv_geometry.hpp"
#include "gvm/rotmath.hpp"

namespace gvm {

// Per-frame inputs for global trajectory recovery. `v_root` is the root
// displacement from frame t to t+1 expressed in the body (SMPL) frame, in
// meters per frame; r_delta[0] is ignored.
struct TrajectoryInputs {
  std::vector<Rotation> gamma_gv;
  std::vector<Rotation> gamma_c;
  std::vector<Rotation> r_delta;
  std::vector<Vec3> v_root;
  double fps = 30.0;
};

// Recovered trajectory in the frame-0 gravity-view system: gravity is exactly
// +y, translation[0] is exactly zero and orientation[0] equals gamma_gv[0].
struct WorldTrajectory {
  std::vector<Rotation> orientation;
  std::vector<Vec3> translation;
};

// Rolls per-frame GV orientations out to the frame-0 GV system:
// out[t] = (prod_{i=1..t} r_delta_gv[i]) * gamma_gv[t], accumulated
// left-to-right. r_delta_gv[0] is ignored.
std::vector<Rotation> recover_world_orientations(std::span<const Rotation> gamma_gv,
                                                 std::span<const Rotation> r_delta_gv);

// Cumulative sum of body-frame displacements rotated into the world:
// out[0] = 0, out[t] = sum_{i=0}^{t-1} gamma_w[i] * v_root[i].
std::vector<Vec3> recover_world_translations(std::span<const Rotation> gamma_w,
                                             std::span<const Vec3> v_root);

// Full pipeline: relative GV yaws, orientation rollout, translation rollout.
WorldTrajectory recover_global_trajectory(const TrajectoryInputs& inputs);

// Baseline that chains raw camera relative rotations instead of GV yaws:
// out[t] = (r_delta[1] * ... * r_delta[t])^-1 * gamma_c[t]. Accumulates any
// tilt error present in r_delta; kept for side-by-side comparison.
std::vector<Rotation> naive_camera_chain_orientations(std::span<const Rotation> gamma_c,
                                                      std::span<const Rotation> r_delta);

}  // namespace gvm
