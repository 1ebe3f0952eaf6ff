#pragma once

#include <Eigen/Core>

#include "gvm/camera.hpp"
#include "gvm/model.hpp"
#include "gvm/skeleton.hpp"

namespace gvm::model {

struct LossWeights {
  double v_root = 1.0;
  double gamma_gv = 1.0;
  double smpl = 1.0;
  double j3d = 1.0;
  double j2d = 1.0;
  double v3d = 1.0;
  double stationary = 1.0;
};

// Ground truth, one column per frame. Rotation targets use the 6D encoding;
// joints2d are pixel coordinates of all skeleton joints (2J x T); points3d
// are camera-frame positions of the generic point set (3P x T); stationary
// labels are {0,1}.
struct LossTargets {
  Eigen::MatrixXd v_root;      // 3 x T
  Eigen::MatrixXd gamma_gv;    // 6 x T
  Eigen::MatrixXd theta;       // 3*pose_joints x T
  Eigen::MatrixXd beta;        // 10 x T
  Eigen::MatrixXd joints2d;    // 2J x T
  Eigen::MatrixXd points3d;    // 3P x T
  Eigen::MatrixXd stationary;  // S x T
};

// Side inputs for the geometry-dependent terms. `point_weights` (P x J, rows
// summing to 1) maps joints to the generic 3D point set; empty means the
// points are the joints themselves. `bbox` columns are (cx, cy, size) in
// pixels per frame.
struct LossContext {
  const Skeleton* skeleton = nullptr;
  CameraIntrinsics intrinsics;
  Eigen::MatrixXd bbox;           // 3 x T
  Eigen::MatrixXd point_weights;  // P x J or empty
};

struct LossBreakdown {
  double v_root = 0.0;
  double gamma_gv = 0.0;
  double smpl = 0.0;
  double j3d = 0.0;
  double j2d = 0.0;
  double v3d = 0.0;
  double stationary = 0.0;
  double total = 0.0;
};

// Loss terms over the raw multitask outputs: mean squared error everywhere
// except the stationary term, which is binary cross-entropy on logits. The
// 3D/2D joint terms run the pose through forward kinematics (and the 2D term
// through the weak-camera restoration and a pinhole projection). When `grads`
// is non-null, the analytic gradients of the weighted total with respect to
// every raw head output are accumulated there.
LossBreakdown compute_losses(const ModelConfig& config, const MultiTaskOutput& pred,
                             const LossTargets& gt, const LossContext& ctx,
                             const LossWeights& weights, HeadGradients* grads = nullptr);

}  // namespace gvm::model
