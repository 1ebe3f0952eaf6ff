#include "gvm/metrics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <string>

namespace gvm::metrics {

namespace {

void require_same_shape(const JointTrack& a, const JointTrack& b, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeMismatch(std::string(what) + ": frame counts differ (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].rows() != b[t].rows() || a[t].cols() != 3 || b[t].cols() != 3) {
      throw ShapeMismatch(std::string(what) + ": joint shapes differ at frame " +
                          std::to_string(t));
    }
  }
}

Eigen::MatrixXd stack_frames(const JointTrack& track, std::size_t begin, std::size_t end) {
  const Eigen::Index joints = track[begin].rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin) * joints, 3);
  for (std::size_t t = begin; t < end; ++t) {
    out.middleRows(static_cast<Eigen::Index>(t - begin) * joints, joints) = track[t];
  }
  return out;
}

}  // namespace

SimilarityTransform umeyama_align(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                  bool with_scale, int min_rank) {
  if (P.rows() != Q.rows() || P.cols() != 3 || Q.cols() != 3) {
    throw ShapeMismatch("umeyama_align: point sets must be N x 3 with equal N");
  }
  const Eigen::Index n = P.rows();
  if (n < 3) {
    throw DegenerateConfiguration("umeyama_align: need at least 3 points");
  }

  const Eigen::RowVector3d mu_p = P.colwise().mean();
  const Eigen::RowVector3d mu_q = Q.colwise().mean();
  const Eigen::MatrixXd Pc = P.rowwise() - mu_p;
  const Eigen::MatrixXd Qc = Q.rowwise() - mu_q;

  const double var_p = Pc.rowwise().squaredNorm().mean();
  const Mat3 cov = (Qc.transpose() * Pc) / static_cast<double>(n);

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < 3; ++i) {
    if (d(i) > 1e-12 * std::max(1.0, d(0))) {
      ++rank;
    }
  }
  if (rank < min_rank) {
    throw DegenerateConfiguration("umeyama_align: rank-" + std::to_string(rank) +
                                  " point configuration");
  }

  Vec3 s = Vec3::Ones();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    s(2) = -1.0;
  }
  const Mat3 r = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();

  SimilarityTransform out;
  out.rotation = Rotation::from_matrix(r, 1e-6);
  if (with_scale) {
    if (var_p < 1e-15) {
      throw DegenerateConfiguration("umeyama_align: zero-variance source points");
    }
    out.scale = d.dot(s) / var_p;
  }
  out.translation = mu_q.transpose() - out.scale * (r * mu_p.transpose());
  return out;
}

double mpjpe(const JointTrack& pred, const JointTrack& gt) {
  require_same_shape(pred, gt, "mpjpe");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const Eigen::RowVector3d root_p = pred[t].row(0);
    const Eigen::RowVector3d root_g = gt[t].row(0);
    sum += ((pred[t].rowwise() - root_p) - (gt[t].rowwise() - root_g)).rowwise().norm().sum();
    count += static_cast<std::size_t>(pred[t].rows());
  }
  return 1000.0 * sum / static_cast<double>(count);
}

double pa_mpjpe(const JointTrack& pred, const JointTrack& gt) {
  require_same_shape(pred, gt, "pa_mpjpe");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const SimilarityTransform xf = umeyama_align(pred[t], gt[t], /*with_scale=*/true);
    Eigen::MatrixXd aligned = pred[t];
    for (Eigen::Index j = 0; j < aligned.rows(); ++j) {
      aligned.row(j) = xf.apply(pred[t].row(j).transpose()).transpose();
    }
    sum += (aligned - gt[t]).rowwise().norm().sum();
    count += static_cast<std::size_t>(pred[t].rows());
  }
  return 1000.0 * sum / static_cast<double>(count);
}

double accel_error(const JointTrack& pred, const JointTrack& gt, double fps) {
  require_same_shape(pred, gt, "accel_error");
  if (pred.size() < 3) {
    throw TooShort("accel_error: need at least 3 frames");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t + 1 < pred.size(); ++t) {
    const Eigen::MatrixXd ap = pred[t + 1] - 2.0 * pred[t] + pred[t - 1];
    const Eigen::MatrixXd ag = gt[t + 1] - 2.0 * gt[t] + gt[t - 1];
    sum += (ap - ag).rowwise().norm().sum();
    count += static_cast<std::size_t>(pred[t].rows());
  }
  return fps * fps * sum / static_cast<double>(count);
}

double segmented_world_mpjpe(const JointTrack& pred, const JointTrack& gt, int segment_len,
                             SegmentAlign mode) {
  require_same_shape(pred, gt, "segmented_world_mpjpe");
  if (pred.size() < 2) {
    throw TooShort("segmented_world_mpjpe: need at least 2 frames");
  }
  if (segment_len < 2) {
    throw BadConfig("segmented_world_mpjpe: segment_len must be >= 2");
  }

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t begin = 0; begin < pred.size(); begin += static_cast<std::size_t>(segment_len)) {
    const std::size_t end = std::min(pred.size(), begin + static_cast<std::size_t>(segment_len));
    if (end - begin < 2) {
      break;  // trailing remainder too short for a first-two-frames fit
    }
    const std::size_t fit_end = (mode == SegmentAlign::first_two) ? begin + 2 : end;
    const SimilarityTransform xf = umeyama_align(stack_frames(pred, begin, fit_end),
                                                 stack_frames(gt, begin, fit_end),
                                                 /*with_scale=*/false);
    for (std::size_t t = begin; t < end; ++t) {
      Eigen::MatrixXd aligned = pred[t];
      for (Eigen::Index j = 0; j < aligned.rows(); ++j) {
        aligned.row(j) = xf.apply(pred[t].row(j).transpose()).transpose();
      }
      sum += (aligned - gt[t]).rowwise().norm().sum();
      count += static_cast<std::size_t>(pred[t].rows());
    }
  }
  return 1000.0 * sum / static_cast<double>(count);
}

double rte(std::span<const Vec3> pred_root, std::span<const Vec3> gt_root) {
  if (pred_root.size() != gt_root.size()) {
    throw ShapeMismatch("rte: track lengths differ");
  }
  if (pred_root.size() < 2) {
    throw TooShort("rte: need at least 2 frames");
  }
  double path = 0.0;
  for (std::size_t t = 1; t < gt_root.size(); ++t) {
    path += (gt_root[t] - gt_root[t - 1]).norm();
  }
  if (path <= 0.0) {
    throw ZeroPathLength("rte: ground-truth path length is zero");
  }

  Eigen::MatrixXd P(static_cast<Eigen::Index>(pred_root.size()), 3);
  Eigen::MatrixXd Q(static_cast<Eigen::Index>(gt_root.size()), 3);
  for (std::size_t t = 0; t < pred_root.size(); ++t) {
    P.row(static_cast<Eigen::Index>(t)) = pred_root[t].transpose();
    Q.row(static_cast<Eigen::Index>(t)) = gt_root[t].transpose();
  }
  const SimilarityTransform xf = umeyama_align(P, Q, /*with_scale=*/false, /*min_rank=*/1);
  double err = 0.0;
  for (std::size_t t = 0; t < pred_root.size(); ++t) {
    err += (xf.apply(pred_root[t]) - gt_root[t]).norm();
  }
  return 100.0 * (err / static_cast<double>(pred_root.size())) / path;
}

double jitter(const JointTrack& joints, double fps) {
  if (joints.size() < 4) {
    throw TooShort("jitter: need at least 4 frames");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t + 3 < joints.size(); ++t) {
    const Eigen::MatrixXd d3 =
        joints[t + 3] - 3.0 * joints[t + 2] + 3.0 * joints[t + 1] - joints[t];
    sum += d3.rowwise().norm().sum();
    count += static_cast<std::size_t>(joints[t].rows());
  }
  return fps * fps * fps * sum / static_cast<double>(count);
}

double foot_sliding(const std::vector<std::vector<Vec3>>& pred_feet,
                    const std::vector<std::vector<char>>& contact_mask, double fps) {
  (void)fps;
  if (pred_feet.size() != contact_mask.size()) {
    throw ShapeMismatch("foot_sliding: frame counts differ");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t < pred_feet.size(); ++t) {
    if (pred_feet[t].size() != contact_mask[t].size()) {
      throw ShapeMismatch("foot_sliding: foot counts differ at frame " + std::to_string(t));
    }
    for (std::size_t f = 0; f < pred_feet[t].size(); ++f) {
      if (contact_mask[t][f] && contact_mask[t - 1][f]) {
        const Vec3 d = pred_feet[t][f] - pred_feet[t - 1][f];
        sum += std::hypot(d.x(), d.z());
        ++count;
      }
    }
  }
  if (count == 0) {
    throw NoContactFrames("foot_sliding: no consecutive contact frames");
  }
  return 1000.0 * sum / static_cast<double>(count);
}

std::vector<std::vector<char>> contact_from_heights(const std::vector<std::vector<Vec3>>& gt_feet,
                                                    double height_tol_m) {
  if (gt_feet.empty()) {
    return {};
  }
  const std::size_t n_feet = gt_feet[0].size();
  std::vector<double> min_height(n_feet, std::numeric_limits<double>::infinity());
  for (const auto& frame : gt_feet) {
    if (frame.size() != n_feet) {
      throw ShapeMismatch("contact_from_heights: foot counts differ across frames");
    }
    for (std::size_t f = 0; f < n_feet; ++f) {
      min_height[f] = std::min(min_height[f], frame[f].y());
    }
  }
  std::vector<std::vector<char>> mask(gt_feet.size(), std::vector<char>(n_feet, 0));
  for (std::size_t t = 0; t < gt_feet.size(); ++t) {
    for (std::size_t f = 0; f < n_feet; ++f) {
      mask[t][f] = gt_feet[t][f].y() < min_height[f] + height_tol_m ? 1 : 0;
    }
  }
  return mask;
}

double foot_sliding_from_heights(const std::vector<std::vector<Vec3>>& pred_feet,
                                 const std::vector<std::vector<Vec3>>& gt_feet, double fps,
                                 double height_tol_m) {
  return foot_sliding(pred_feet, contact_from_heights(gt_feet, height_tol_m), fps);
}

std::string MetricsReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v.has_value()) {
      j[key] = *v;
    }
  };
  put("pa_mpjpe_mm", pa_mpjpe_mm);
  put("mpjpe_mm", mpjpe_mm);
  put("accel_m_s2", accel_m_s2);
  put("wa_mpjpe_100_mm", wa_mpjpe_100_mm);
  put("w_mpjpe_100_mm", w_mpjpe_100_mm);
  put("rte_percent", rte_percent);
  put("jitter_m_s3", jitter_m_s3);
  put("foot_sliding_mm", foot_sliding_mm);
  j["protocol"] = {
      {"world_alignment", "rigid"},
      {"pa_alignment", "similarity"},
      {"segment_len", segment_len},
      {"contact_source", contact_source},
      {"rte", "mean aligned root error over gt path length"},
  };
  return j.dump(indent);
}

}  // namespace gvm::metrics
