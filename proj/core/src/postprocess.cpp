#include "gvm/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gvm {

StationaryTrack StationaryTrack::from_logits(const Eigen::MatrixXd& logits) {
  StationaryTrack out;
  out.logits = logits;
  out.probs = logits.unaryExpr([](double s) { return 1.0 / (1.0 + std::exp(-s)); });
  return out;
}

StationaryTrack StationaryTrack::from_probs(const Eigen::MatrixXd& probs, double logit_clamp) {
  if ((probs.array() < 0.0).any() || (probs.array() > 1.0).any()) {
    throw ProbabilityOutOfRange("stationary probabilities must lie in [0, 1]");
  }
  StationaryTrack out;
  out.probs = probs;
  out.logits = probs.unaryExpr([logit_clamp](double p) {
    const double lo = 1.0 / (1.0 + std::exp(logit_clamp));
    const double clamped = std::clamp(p, lo, 1.0 - lo);
    return std::log(clamped / (1.0 - clamped));
  });
  return out;
}

std::vector<Vec3> refine_global_translation(std::span<const Vec3> tau,
                                            const std::vector<std::vector<Vec3>>& joint_positions,
                                            const Eigen::MatrixXd& logits,
                                            std::span<const char> active) {
  const std::size_t frames = tau.size();
  if (joint_positions.size() != frames || static_cast<std::size_t>(logits.rows()) != frames) {
    throw ShapeMismatch("refine_global_translation: frame counts differ");
  }
  if (!active.empty() && active.size() != frames) {
    throw ShapeMismatch("refine_global_translation: active mask length differs");
  }
  const auto candidates = static_cast<std::size_t>(logits.cols());
  for (const auto& per_frame : joint_positions) {
    if (per_frame.size() != candidates) {
      throw ShapeMismatch("refine_global_translation: candidate joint counts differ");
    }
  }

  std::vector<Vec3> out(tau.begin(), tau.end());
  Vec3 cumulative = Vec3::Zero();
  for (std::size_t i = 1; i < frames; ++i) {
    if (active.empty() || active[i]) {
      const Eigen::RowVectorXd row = logits.row(static_cast<Eigen::Index>(i));
      Eigen::RowVectorXd w = (row.array() - row.maxCoeff()).exp();
      w /= w.sum();
      Vec3 correction = Vec3::Zero();
      for (std::size_t j = 0; j < candidates; ++j) {
        correction += w(static_cast<Eigen::Index>(j)) *
                      (joint_positions[i][j] - joint_positions[i - 1][j]);
      }
      cumulative += correction;
    }
    out[i] -= cumulative;
  }
  return out;
}

std::vector<Vec3> adjust_stationary_positions(std::span<const Vec3> positions,
                                              std::span<const double> probs) {
  if (positions.size() != probs.size()) {
    throw ShapeMismatch("adjust_stationary_positions: track lengths differ");
  }
  std::vector<Vec3> out(positions.begin(), positions.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double c = probs[i];
    if (c < 0.0 || c > 1.0) {
      throw ProbabilityOutOfRange("stationary probability " + std::to_string(c) + " at frame " +
                                  std::to_string(i));
    }
    out[i] = positions[i] * (1.0 - c) + out[i - 1] * c;
  }
  return out;
}

MotionSequence postprocess_motion(const MotionSequence& motion, const Skeleton& skel,
                                  const PostprocessParams& params) {
  const int frames = motion.frame_count();
  const auto& candidates = skel.stationary_candidates();
  const auto n_cand = static_cast<Eigen::Index>(candidates.size());
  if (!motion.has_stationary_probs() || motion.stationary_probs.rows() != frames ||
      motion.stationary_probs.cols() != n_cand) {
    throw ShapeMismatch("postprocess_motion: motion must carry stationary probabilities for " +
                        std::to_string(candidates.size()) + " candidate joints");
  }
  if (static_cast<int>(motion.root_translation.size()) != frames ||
      static_cast<int>(motion.joint_rotations.size()) != frames) {
    throw ShapeMismatch("postprocess_motion: inconsistent track lengths");
  }

  const StationaryTrack track =
      StationaryTrack::from_probs(motion.stationary_probs, params.logit_clamp);

  // Candidate world positions from the incoming motion.
  std::vector<std::vector<Vec3>> cand_positions(static_cast<std::size_t>(frames));
  for (int i = 0; i < frames; ++i) {
    const auto fi = static_cast<std::size_t>(i);
    const auto fk = forward_kinematics(skel, motion.root_orientation[fi],
                                       motion.root_translation[fi], motion.joint_rotations[fi]);
    cand_positions[fi].reserve(candidates.size());
    for (int c : candidates) {
      cand_positions[fi].push_back(fk[static_cast<std::size_t>(c)]);
    }
  }

  std::vector<char> active(static_cast<std::size_t>(frames), 0);
  for (int i = 0; i < frames; ++i) {
    active[static_cast<std::size_t>(i)] =
        motion.stationary_probs.row(i).maxCoeff() > params.contact_threshold ? 1 : 0;
  }

  MotionSequence out = motion;
  out.root_translation = refine_global_translation(motion.root_translation, cand_positions,
                                                   track.logits, active);

  // Candidate positions shift rigidly with the translation correction.
  for (int i = 0; i < frames; ++i) {
    const auto fi = static_cast<std::size_t>(i);
    const Vec3 shift = out.root_translation[fi] - motion.root_translation[fi];
    for (auto& p : cand_positions[fi]) {
      p += shift;
    }
  }

  // Fine-grained stationary targets per candidate joint.
  std::vector<std::vector<Vec3>> targets(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    std::vector<Vec3> track_j(static_cast<std::size_t>(frames));
    std::vector<double> probs_j(static_cast<std::size_t>(frames));
    for (int i = 0; i < frames; ++i) {
      track_j[static_cast<std::size_t>(i)] = cand_positions[static_cast<std::size_t>(i)][j];
      probs_j[static_cast<std::size_t>(i)] = motion.stationary_probs(i, static_cast<Eigen::Index>(j));
    }
    targets[j] = adjust_stationary_positions(track_j, probs_j);
  }

  for (int i = 0; i < frames; ++i) {
    const auto fi = static_cast<std::size_t>(i);
    std::vector<IkTarget> frame_targets;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (motion.stationary_probs(i, static_cast<Eigen::Index>(j)) > params.contact_threshold) {
        frame_targets.push_back({candidates[j], targets[j][fi]});
      }
    }
    if (!frame_targets.empty()) {
      const IkResult solved =
          ccd_ik_solve(skel, out.root_orientation[fi], out.root_translation[fi],
                       out.joint_rotations[fi], frame_targets, params.ik);
      out.joint_rotations[fi] = solved.theta;
    }
  }

  if (motion.has_joint_positions()) {
    for (int i = 0; i < frames; ++i) {
      const auto fi = static_cast<std::size_t>(i);
      out.joint_positions[fi] = forward_kinematics(skel, out.root_orientation[fi],
                                                   out.root_translation[fi],
                                                   out.joint_rotations[fi]);
    }
  }
  return out;
}

}  // namespace gvm
