#pragma once

#include <span>
#include <vector>

#include "gvm/skeleton.hpp"

namespace gvm {

struct IkTarget {
  int joint = 0;
  Vec3 position = Vec3::Zero();
};

struct IkResult {
  std::vector<Vec3> theta;
  int iterations = 0;
  bool converged = false;
  // Summed target error before iteration 1, and after each outer iteration.
  std::vector<double> error_history;
};

struct IkParams {
  int max_iter = 50;
  double tol = 1e-4;            // meters, per target
  double max_step_rad = 0.5;     // per-joint correction clamp per update
};

// Cyclic coordinate descent toward position targets. Joints are visited from
// each target's parent upward to the root (root orientation and translation
// stay fixed). The summed target error is monotone over outer iterations: an
// outer pass that would increase it is rolled back and iteration stops.
IkResult ccd_ik_solve(const Skeleton& skel, const Rotation& root_rot, const Vec3& root_pos,
                      std::span<const Vec3> theta, std::span<const IkTarget> targets,
                      const IkParams& params = {});

}  // namespace gvm
