#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "gvm/ik.hpp"
#include "gvm/motion.hpp"
#include "gvm/skeleton.hpp"

namespace gvm {

// Per-frame, per-candidate stationary logits with their sigmoid probabilities.
struct StationaryTrack {
  Eigen::MatrixXd logits;  // frames x candidates
  Eigen::MatrixXd probs;   // sigmoid(logits), same shape

  static StationaryTrack from_logits(const Eigen::MatrixXd& logits);
  static StationaryTrack from_probs(const Eigen::MatrixXd& probs, double logit_clamp = 40.0);
};

// Removes the softmax-weighted mean displacement of the candidate joints from
// the root translation, frame by frame: at every frame i >= 1 the correction
// d_i = sum_j (p_i^j - p_{i-1}^j) * softmax_j(logits_i) is subtracted from all
// later translations. `active` (optional, per-frame) restricts which frames
// contribute a correction; empty means all frames.
std::vector<Vec3> refine_global_translation(std::span<const Vec3> tau,
                                            const std::vector<std::vector<Vec3>>& joint_positions,
                                            const Eigen::MatrixXd& logits,
                                            std::span<const char> active = {});

// Recursive blend toward the previous adjusted position:
// out[0] = positions[0]; out[i] = positions[i]*(1-c[i]) + out[i-1]*c[i].
// c = 1 freezes the joint, c = 0 passes the input through. Throws
// ProbabilityOutOfRange when any c is outside [0, 1].
std::vector<Vec3> adjust_stationary_positions(std::span<const Vec3> positions,
                                              std::span<const double> probs);

struct PostprocessParams {
  double contact_threshold = 0.5;  // a joint gets an IK target when p > this
  double logit_clamp = 40.0;       // |logit| bound when converting from probabilities
  IkParams ik;
};

// Full stationary-joint cleanup: translation refinement, per-joint stationary
// position adjustment, then per-frame CCD IK toward the adjusted targets.
// The motion must carry stationary probabilities for the skeleton's candidate
// joints. Frames with no candidate above the contact threshold are left
// untouched by the translation refinement.
MotionSequence postprocess_motion(const MotionSequence& motion, const Skeleton& skel,
                                  const PostprocessParams& params = {});

}  // namespace gvm
