#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvm/rotmath.hpp"

namespace gvm::metrics {

// Joint positions for one sequence: joints[t] is an N x 3 matrix (rows are
// joints, meters).
using JointTrack = std::vector<Eigen::MatrixXd>;

struct SimilarityTransform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

// Closed-form least-squares similarity (or rigid, when with_scale is false)
// minimizing ||s R p + t - q||^2 over the rows of P and Q. Throws
// DegenerateConfiguration for fewer than 3 points or a configuration whose
// covariance rank falls below `min_rank`. Straight-line tracks (rank 1) still
// have a well-defined residual; rte aligns them with min_rank 1.
SimilarityTransform umeyama_align(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                  bool with_scale, int min_rank = 2);

// Mean per-joint position error after root alignment (joint 0), millimeters.
double mpjpe(const JointTrack& pred, const JointTrack& gt);

// Mean per-joint position error after per-frame similarity alignment, mm.
double pa_mpjpe(const JointTrack& pred, const JointTrack& gt);

// Mean norm of the difference of second finite differences, scaled by fps^2
// (m/s^2). Needs at least 3 frames.
double accel_error(const JointTrack& pred, const JointTrack& gt, double fps);

enum class SegmentAlign {
  whole,      // rigid fit over every frame of the segment
  first_two,  // rigid fit over the first two frames only
};

// World joint error over consecutive non-overlapping segments, each rigidly
// aligned to the ground truth before measuring. Trailing remainders shorter
// than 2 frames are dropped. Millimeters.
double segmented_world_mpjpe(const JointTrack& pred, const JointTrack& gt, int segment_len,
                             SegmentAlign mode);

// Root translation error as a percentage of the ground-truth path length,
// after rigid alignment of the full trajectories.
double rte(std::span<const Vec3> pred_root, std::span<const Vec3> gt_root);

// Mean norm of the third finite difference of joint positions, scaled by
// fps^3 (m/s^3). Needs at least 4 frames.
double jitter(const JointTrack& joints, double fps);

// Mean horizontal (xz-plane) displacement of the foot between consecutive
// in-contact frames, millimeters. Contact comes from the mask when provided;
// otherwise a frame is in contact when the ground-truth foot height (y, y-up)
// is within 30 mm of that foot's sequence minimum. `fps` is carried for
// interface symmetry with the other metrics and does not affect the value.
double foot_sliding(const std::vector<std::vector<Vec3>>& pred_feet,
                    const std::vector<std::vector<char>>& contact_mask,
                    double fps);
double foot_sliding_from_heights(const std::vector<std::vector<Vec3>>& pred_feet,
                                 const std::vector<std::vector<Vec3>>& gt_feet,
                                 double fps, double height_tol_m = 0.030);

std::vector<std::vector<char>> contact_from_heights(const std::vector<std::vector<Vec3>>& gt_feet,
                                                    double height_tol_m = 0.030);

struct MetricsReport {
  std::optional<double> pa_mpjpe_mm;
  std::optional<double> mpjpe_mm;
  std::optional<double> accel_m_s2;
  std::optional<double> wa_mpjpe_100_mm;
  std::optional<double> w_mpjpe_100_mm;
  std::optional<double> rte_percent;
  std::optional<double> jitter_m_s3;
  std::optional<double> foot_sliding_mm;
  int segment_len = 100;
  std::string contact_source = "mask";  // "mask" or "height_30mm"

  // Flat JSON object of named floats, units in the key suffixes, plus a
  // protocol block recording the pinned alignment/contact definitions.
  std::string to_json(int indent = 2) const;
};

}  // namespace gvm::metrics
