#include "gvm/ik.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gvm {

namespace {

double summed_error(const Skeleton& skel, const Rotation& root_rot, const Vec3& root_pos,
                    std::span<const Vec3> theta, std::span<const IkTarget> targets) {
  const auto fk = forward_kinematics(skel, root_rot, root_pos, theta);
  double err = 0.0;
  for (const IkTarget& t : targets) {
    err += (fk[static_cast<std::size_t>(t.joint)] - t.position).norm();
  }
  return err;
}

}  // namespace

IkResult ccd_ik_solve(const Skeleton& skel, const Rotation& root_rot, const Vec3& root_pos,
                      std::span<const Vec3> theta, std::span<const IkTarget> targets,
                      const IkParams& params) {
  if (params.max_iter < 1) {
    throw BadConfig("ccd_ik_solve: max_iter must be >= 1");
  }
  for (const IkTarget& t : targets) {
    if (t.joint < 0 || t.joint >= skel.joint_count()) {
      throw UnknownJoint("ccd_ik_solve: target joint " + std::to_string(t.joint) +
                         " out of range");
    }
  }

  IkResult result;
  result.theta.assign(theta.begin(), theta.end());
  result.error_history.push_back(summed_error(skel, root_rot, root_pos, result.theta, targets));
  if (targets.empty()) {
    result.converged = true;
    return result;
  }

  // Chains from each end effector's parent upward, root excluded.
  std::vector<std::vector<int>> chains(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    auto chain = skel.chain_to_root(targets[k].joint);
    if (!chain.empty()) {
      chain.erase(chain.begin());  // skip the end effector itself
    }
    chains[k] = std::move(chain);
  }

  for (int iter = 0; iter < params.max_iter; ++iter) {
    const std::vector<Vec3> snapshot = result.theta;

    for (std::size_t k = 0; k < targets.size(); ++k) {
      const IkTarget& target = targets[k];
      for (int j : chains[k]) {
        const FkResult fk = forward_kinematics_full(skel, root_rot, root_pos, result.theta);
        const Vec3& pivot = fk.positions[static_cast<std::size_t>(j)];
        const Vec3 to_effector = fk.positions[static_cast<std::size_t>(target.joint)] - pivot;
        const Vec3 to_target = target.position - pivot;
        const double en = to_effector.norm();
        const double tn = to_target.norm();
        if (en < 1e-10 || tn < 1e-10) {
          continue;
        }
        Vec3 axis = to_effector.cross(to_target);
        const double axis_norm = axis.norm();
        if (axis_norm < 1e-12) {
          continue;
        }
        double angle = std::atan2(axis_norm, to_effector.dot(to_target));
        angle = std::min(angle, params.max_step_rad);
        const Rotation correction = Rotation::from_axis_angle(axis / axis_norm * angle);

        const int parent = skel.joint(j).parent;
        const Rotation& parent_global = fk.global_rotations[static_cast<std::size_t>(parent)];
        const Rotation new_global = correction * fk.global_rotations[static_cast<std::size_t>(j)];
        result.theta[static_cast<std::size_t>(j - 1)] =
            (parent_global.inverse() * new_global).to_axis_angle();
      }
    }

    const double err = summed_error(skel, root_rot, root_pos, result.theta, targets);
    if (err > result.error_history.back()) {
      result.theta = snapshot;
      break;
    }
    result.error_history.push_back(err);
    result.iterations = iter + 1;

    bool all_within = true;
    const auto fk = forward_kinematics(skel, root_rot, root_pos, result.theta);
    for (const IkTarget& t : targets) {
      if ((fk[static_cast<std::size_t>(t.joint)] - t.position).norm() >= params.tol) {
        all_within = false;
        break;
      }
    }
    if (all_within) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace gvm
