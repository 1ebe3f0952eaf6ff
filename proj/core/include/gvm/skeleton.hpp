#pragma once

#include <span>
#include <string>
#include <vector>

#include "gvm/rotmath.hpp"

namespace gvm {

struct Joint {
  std::string name;
  int parent = -1;           // -1 for the root only
  Vec3 offset = Vec3::Zero();  // rest offset from parent, meters
};

// Topologically sorted joint tree (parent index < child index, single root at
// index 0) with a designated list of stationary-candidate joints.
class Skeleton {
 public:
  Skeleton(std::vector<Joint> joints, std::vector<int> stationary_candidates);

  int joint_count() const { return static_cast<int>(joints_.size()); }
  const Joint& joint(int i) const { return joints_.at(static_cast<std::size_t>(i)); }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<int>& stationary_candidates() const { return stationary_candidates_; }

  // Index lookup by name; throws UnknownJoint.
  int index_of(const std::string& name) const;

  // Chain of joint indices from `joint` up to (excluding) the root,
  // starting at the joint itself.
  std::vector<int> chain_to_root(int joint) const;

  // Bundled 24-joint SMPL-layout skeleton with approximate neutral rest
  // offsets; stationary candidates are heels (ankles), toes (feet) and hands.
  static Skeleton smpl24();

  static constexpr const char* kSmpl24Version = "smpl24-v1";

 private:
  std::vector<Joint> joints_;
  std::vector<int> stationary_candidates_;
};

// Rigid-chain forward kinematics. `theta` holds one axis-angle rotation per
// non-root joint (joint i uses theta[i-1]); returns one position per joint.
std::vector<Vec3> forward_kinematics(const Skeleton& skel, const Rotation& root_rot,
                                     const Vec3& root_pos, std::span<const Vec3> theta);

// Same, but also returns the per-joint global rotations (used by IK and the
// pose gradients).
struct FkResult {
  std::vector<Vec3> positions;
  std::vector<Rotation> global_rotations;
};
FkResult forward_kinematics_full(const Skeleton& skel, const Rotation& root_rot,
                                 const Vec3& root_pos, std::span<const Vec3> theta);

}  // namespace gvm
