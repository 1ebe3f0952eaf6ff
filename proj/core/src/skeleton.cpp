#include "gvm/skeleton.hpp"

#include <string>

namespace gvm {

Skeleton::Skeleton(std::vector<Joint> joints, std::vector<int> stationary_candidates)
    : joints_(std::move(joints)), stationary_candidates_(std::move(stationary_candidates)) {
  if (joints_.empty() || joints_[0].parent != -1) {
    throw ShapeMismatch("skeleton must have a single root at index 0");
  }
  for (std::size_t i = 1; i < joints_.size(); ++i) {
    if (joints_[i].parent < 0 || joints_[i].parent >= static_cast<int>(i)) {
      throw ShapeMismatch("skeleton joints must be topologically sorted (joint " +
                          std::to_string(i) + ")");
    }
    if (joints_[i].offset.norm() == 0.0) {
      throw ShapeMismatch("non-root joint " + joints_[i].name + " has zero rest offset");
    }
  }
  for (int c : stationary_candidates_) {
    if (c <= 0 || c >= joint_count()) {
      throw UnknownJoint("stationary candidate index " + std::to_string(c) + " out of range");
    }
  }
}

int Skeleton::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) {
      return static_cast<int>(i);
    }
  }
  throw UnknownJoint("no joint named '" + name + "'");
}

std::vector<int> Skeleton::chain_to_root(int joint) const {
  if (joint < 0 || joint >= joint_count()) {
    throw UnknownJoint("joint index " + std::to_string(joint) + " out of range");
  }
  std::vector<int> chain;
  for (int j = joint; j != 0; j = joints_[static_cast<std::size_t>(j)].parent) {
    chain.push_back(j);
  }
  return chain;
}

Skeleton Skeleton::smpl24() {
  // Approximate neutral rest offsets for the standard 24-joint SMPL layout,
  // rounded to centimeters in a y-up body frame (version smpl24-v1).
  std::vector<Joint> j = {
      {"pelvis", -1, {0.00, 0.00, 0.00}},
      {"left_hip", 0, {0.07, -0.09, -0.01}},
      {"right_hip", 0, {-0.07, -0.09, -0.01}},
      {"spine1", 0, {0.00, 0.11, -0.01}},
      {"left_knee", 1, {0.04, -0.38, 0.00}},
      {"right_knee", 2, {-0.04, -0.38, 0.00}},
      {"spine2", 3, {0.00, 0.14, 0.00}},
      {"left_ankle", 4, {-0.01, -0.40, -0.02}},
      {"right_ankle", 5, {0.01, -0.40, -0.02}},
      {"spine3", 6, {0.00, 0.06, 0.00}},
      {"left_foot", 7, {0.02, -0.06, 0.12}},
      {"right_foot", 8, {-0.02, -0.06, 0.12}},
      {"neck", 9, {0.00, 0.21, -0.01}},
      {"left_collar", 9, {0.07, 0.11, -0.01}},
      {"right_collar", 9, {-0.07, 0.11, -0.01}},
      {"head", 12, {0.00, 0.07, 0.01}},
      {"left_shoulder", 13, {0.10, 0.03, -0.01}},
      {"right_shoulder", 14, {-0.10, 0.03, -0.01}},
      {"left_elbow", 16, {0.26, 0.00, 0.00}},
      {"right_elbow", 17, {-0.26, 0.00, 0.00}},
      {"left_wrist", 18, {0.25, 0.00, 0.00}},
      {"right_wrist", 19, {-0.25, 0.00, 0.00}},
      {"left_hand", 20, {0.08, 0.00, 0.00}},
      {"right_hand", 21, {-0.08, 0.00, 0.00}},
  };
  // heels, toes, hands
  return Skeleton(std::move(j), {7, 8, 10, 11, 22, 23});
}

FkResult forward_kinematics_full(const Skeleton& skel, const Rotation& root_rot,
                                 const Vec3& root_pos, std::span<const Vec3> theta) {
  const int n = skel.joint_count();
  if (static_cast<int>(theta.size()) != n - 1) {
    throw ShapeMismatch("forward_kinematics: expected " + std::to_string(n - 1) +
                        " joint rotations, got " + std::to_string(theta.size()));
  }
  FkResult out;
  out.positions.resize(static_cast<std::size_t>(n));
  out.global_rotations.resize(static_cast<std::size_t>(n));
  out.positions[0] = root_pos;
  out.global_rotations[0] = root_rot;
  for (int i = 1; i < n; ++i) {
    const Joint& jt = skel.joint(i);
    const auto p = static_cast<std::size_t>(jt.parent);
    out.positions[static_cast<std::size_t>(i)] =
        out.positions[p] + out.global_rotations[p] * jt.offset;
    out.global_rotations[static_cast<std::size_t>(i)] =
        out.global_rotations[p] * Rotation::from_axis_angle(theta[static_cast<std::size_t>(i - 1)]);
  }
  return out;
}

std::vector<Vec3> forward_kinematics(const Skeleton& skel, const Rotation& root_rot,
                                     const Vec3& root_pos, std::span<const Vec3> theta) {
  return forward_kinematics_full(skel, root_rot, root_pos, theta).positions;
}

}  // namespace gvm
