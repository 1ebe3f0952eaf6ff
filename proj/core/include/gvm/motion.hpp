#pragma once

#include <Eigen/Core>
#include <vector>

#include "gvm/rotmath.hpp"

namespace gvm {

// A world- or camera-frame motion clip. Joint rotations are axis-angle, one
// per non-root joint per frame. Joint positions and stationary probabilities
// are optional tracks (empty when absent); stationary_probs has one row per
// frame and one column per stationary-candidate joint.
struct MotionSequence {
  double fps = 30.0;
  std::vector<Rotation> root_orientation;
  std::vector<Vec3> root_translation;
  std::vector<std::vector<Vec3>> joint_rotations;
  std::vector<std::vector<Vec3>> joint_positions;
  Eigen::MatrixXd stationary_probs;

  int frame_count() const { return static_cast<int>(root_orientation.size()); }
  bool has_joint_positions() const { return !joint_positions.empty(); }
  bool has_stationary_probs() const { return stationary_probs.size() > 0; }
};

}  // namespace gvm
