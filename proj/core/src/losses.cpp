#include "gvm/losses.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gvm/errors.hpp"

namespace gvm::model {

namespace {

constexpr double kMinDepth = 1e-3;

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

Vec3 axial(const Mat3& a) {
  return Vec3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

// Right Jacobian of the exponential map: Exp(theta + d) = Exp(theta) Exp(J_r d).
Mat3 so3_right_jacobian(const Vec3& theta) {
  const double th = theta.norm();
  double c1;
  double c2;
  if (th < 1e-4) {
    c1 = 0.5 - th * th / 24.0;
    c2 = 1.0 / 6.0 - th * th / 120.0;
  } else {
    c1 = (1.0 - std::cos(th)) / (th * th);
    c2 = (th - std::sin(th)) / (th * th * th);
  }
  const Mat3 k = skew(theta);
  return Mat3::Identity() - c1 * k + c2 * (k * k);
}

// d(loss)/d(theta_j) given d(loss)/d(R_local_j) for R = Exp(theta).
Vec3 rodrigues_backward(const Vec3& theta, const Mat3& r_local, const Mat3& g_local) {
  return so3_right_jacobian(theta).transpose() * axial(r_local.transpose() * g_local);
}

// Reverse pass through the rigid chain (identity root at the origin):
// given d(loss)/d(position_j), accumulates d(loss)/d(theta).
void fk_backward_theta(const Skeleton& skel, std::span<const Vec3> theta, const FkResult& fk,
                       const std::vector<Vec3>& d_positions, Eigen::Ref<Eigen::VectorXd> d_theta) {
  const int n = skel.joint_count();
  std::vector<Vec3> gp(static_cast<std::size_t>(n), Vec3::Zero());
  std::vector<Mat3> gr(static_cast<std::size_t>(n), Mat3::Zero());
  for (int j = 0; j < n; ++j) {
    gp[static_cast<std::size_t>(j)] = d_positions[static_cast<std::size_t>(j)];
  }
  for (int j = n - 1; j >= 1; --j) {
    const auto ji = static_cast<std::size_t>(j);
    const auto pi = static_cast<std::size_t>(skel.joint(j).parent);
    gp[pi] += gp[ji];
    gr[pi] += gp[ji] * skel.joint(j).offset.transpose();

    const Mat3 r_local =
        Rotation::from_axis_angle(theta[static_cast<std::size_t>(j - 1)]).matrix();
    gr[pi] += gr[ji] * r_local.transpose();
    const Mat3 g_local = fk.global_rotations[pi].matrix().transpose() * gr[ji];
    d_theta.segment<3>(3 * (j - 1)) +=
        rodrigues_backward(theta[static_cast<std::size_t>(j - 1)], r_local, g_local);
  }
}

// Gram-Schmidt decode backward: d(loss)/d(raw 6D) from d(loss)/d(R).
Eigen::Matrix<double, 6, 1> decode_6d_backward(const Eigen::Matrix<double, 6, 1>& v,
                                               const Mat3& g) {
  Vec3 a1 = v.head<3>();
  const Vec3 a2 = v.tail<3>();
  if (a1.norm() < 1e-12) {
    a1 = Vec3(1.0, 0.0, 0.0);
  }
  const double n1 = a1.norm();
  const Vec3 b1 = a1 / n1;
  const double d = b1.dot(a2);
  const Vec3 u = a2 - d * b1;
  const double n2 = u.norm();
  Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
  if (n2 < 1e-12) {
    return out;  // degenerate fallback branch carries no useful gradient
  }
  const Vec3 b2 = u / n2;

  Vec3 gb1 = g.col(0);
  Vec3 gb2 = g.col(1);
  const Vec3 g3 = g.col(2);
  gb1 += b2.cross(g3);
  gb2 += g3.cross(b1);

  const Vec3 gu = (gb2 - b2 * b2.dot(gb2)) / n2;
  const Vec3 ga2 = gu - b1 * b1.dot(gu);
  gb1 += -gu.dot(b1) * a2 - d * gu;
  const Vec3 ga1 = (gb1 - b1 * b1.dot(gb1)) / n1;

  out.head<3>() = ga1;
  out.tail<3>() = ga2;
  return out;
}

void check_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                 const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeMismatch(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
  }
}

// Mean squared error with optional gradient accumulation.
double mse_term(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& gt, double weight,
                Eigen::MatrixXd* grad) {
  const double n = static_cast<double>(pred.size());
  const Eigen::MatrixXd diff = pred - gt;
  if (grad != nullptr) {
    *grad += (2.0 * weight / n) * diff;
  }
  return diff.squaredNorm() / n;
}

}  // namespace

LossBreakdown compute_losses(const ModelConfig& config, const MultiTaskOutput& pred,
                             const LossTargets& gt, const LossContext& ctx,
                             const LossWeights& weights, HeadGradients* grads) {
  const Eigen::Index frames = pred.of(Task::v_root).cols();
  LossBreakdown out;

  if (grads != nullptr) {
    for (int t = 0; t < kTaskCount; ++t) {
      grads->d_raw[static_cast<std::size_t>(t)] = Eigen::MatrixXd::Zero(
          config.task_dim(static_cast<Task>(t)), frames);
    }
  }
  auto grad_of = [&](Task t) -> Eigen::MatrixXd* {
    return grads != nullptr ? &grads->d_raw[static_cast<std::size_t>(t)] : nullptr;
  };

  if (weights.v_root != 0.0) {
    check_shape(gt.v_root, 3, frames, "v_root target");
    out.v_root = mse_term(pred.of(Task::v_root), gt.v_root, weights.v_root,
                          grad_of(Task::v_root));
  }
  if (weights.gamma_gv != 0.0) {
    check_shape(gt.gamma_gv, 6, frames, "gamma_gv target");
    out.gamma_gv = mse_term(pred.of(Task::gamma_gv), gt.gamma_gv, weights.gamma_gv,
                            grad_of(Task::gamma_gv));
  }
  if (weights.smpl != 0.0) {
    check_shape(gt.theta, config.task_dim(Task::theta), frames, "theta target");
    check_shape(gt.beta, 10, frames, "beta target");
    out.smpl = mse_term(pred.of(Task::theta), gt.theta, weights.smpl, grad_of(Task::theta)) +
               mse_term(pred.of(Task::beta), gt.beta, weights.smpl, grad_of(Task::beta));
  }
  if (weights.stationary != 0.0) {
    check_shape(gt.stationary, config.stationary_joints, frames, "stationary target");
    const Eigen::MatrixXd& logits = pred.of(Task::stationary);
    const double n = static_cast<double>(logits.size());
    double bce = 0.0;
    for (Eigen::Index t = 0; t < logits.cols(); ++t) {
      for (Eigen::Index j = 0; j < logits.rows(); ++j) {
        const double x = logits(j, t);
        const double z = gt.stationary(j, t);
        bce += std::max(x, 0.0) - x * z + std::log1p(std::exp(-std::abs(x)));
        if (grads != nullptr) {
          const double sig = 1.0 / (1.0 + std::exp(-x));
          grads->d_raw[static_cast<std::size_t>(Task::stationary)](j, t) +=
              weights.stationary * (sig - z) / n;
        }
      }
    }
    out.stationary = bce / n;
  }

  const bool need_geometry = weights.j3d != 0.0 || weights.j2d != 0.0 || weights.v3d != 0.0;
  if (need_geometry) {
    if (ctx.skeleton == nullptr) {
      throw BadConfig("compute_losses: joint losses need a skeleton");
    }
    const Skeleton& skel = *ctx.skeleton;
    const int n_joints = skel.joint_count();
    if (config.pose_joints != n_joints - 1) {
      throw ShapeMismatch("compute_losses: pose_joints must match the skeleton");
    }
    const Eigen::MatrixXd* a = nullptr;
    Eigen::Index n_points = n_joints;
    if (weights.v3d != 0.0 && ctx.point_weights.size() > 0) {
      if (ctx.point_weights.cols() != n_joints) {
        throw ShapeMismatch("compute_losses: point_weights must have one column per joint");
      }
      a = &ctx.point_weights;
      n_points = ctx.point_weights.rows();
    }
    if (weights.j3d != 0.0) {
      check_shape(gt.theta, config.task_dim(Task::theta), frames, "theta target");
    }
    if (weights.j2d != 0.0) {
      check_shape(gt.joints2d, 2 * n_joints, frames, "joints2d target");
      check_shape(ctx.bbox, 3, frames, "bbox");
    }
    if (weights.v3d != 0.0) {
      check_shape(gt.points3d, 3 * n_points, frames, "points3d target");
      check_shape(ctx.bbox, 3, frames, "bbox");
    }

    const double n_j3d = static_cast<double>(3 * n_joints * frames);
    const double n_j2d = static_cast<double>(2 * n_joints * frames);
    const double n_v3d = static_cast<double>(3 * n_points * frames);

    for (Eigen::Index t = 0; t < frames; ++t) {
      std::vector<Vec3> theta(static_cast<std::size_t>(config.pose_joints));
      for (int j = 0; j < config.pose_joints; ++j) {
        theta[static_cast<std::size_t>(j)] = pred.of(Task::theta).col(t).segment<3>(3 * j);
      }
      const FkResult fk = forward_kinematics_full(skel, Rotation(), Vec3::Zero(), theta);
      std::vector<Vec3> d_local(static_cast<std::size_t>(n_joints), Vec3::Zero());

      if (weights.j3d != 0.0) {
        std::vector<Vec3> gt_theta(static_cast<std::size_t>(config.pose_joints));
        for (int j = 0; j < config.pose_joints; ++j) {
          gt_theta[static_cast<std::size_t>(j)] = gt.theta.col(t).segment<3>(3 * j);
        }
        const auto gt_fk = forward_kinematics(skel, Rotation(), Vec3::Zero(), gt_theta);
        for (int j = 0; j < n_joints; ++j) {
          const Vec3 diff = fk.positions[static_cast<std::size_t>(j)] -
                            gt_fk[static_cast<std::size_t>(j)];
          out.j3d += diff.squaredNorm() / n_j3d;
          d_local[static_cast<std::size_t>(j)] += weights.j3d * 2.0 / n_j3d * diff;
        }
      }

      if (weights.j2d != 0.0 || weights.v3d != 0.0) {
        const Eigen::Matrix<double, 6, 1> gc6 = pred.of(Task::gamma_c).col(t);
        const Rotation gamma_c = decode_rotation_6d(gc6);
        const Eigen::Vector3d weak = pred.of(Task::weak_cam).col(t);
        const Eigen::Vector3d bbox = ctx.bbox.col(t);
        const Vec3 tau = restore_full_translation(weak, bbox, ctx.intrinsics);

        std::vector<Vec3> cam(static_cast<std::size_t>(n_joints));
        for (int j = 0; j < n_joints; ++j) {
          cam[static_cast<std::size_t>(j)] =
              gamma_c * fk.positions[static_cast<std::size_t>(j)] + tau;
        }
        std::vector<Vec3> d_cam(static_cast<std::size_t>(n_joints), Vec3::Zero());

        if (weights.j2d != 0.0) {
          for (int j = 0; j < n_joints; ++j) {
            const Vec3& p = cam[static_cast<std::size_t>(j)];
            const bool clamped = p.z() < kMinDepth;
            const double z = clamped ? kMinDepth : p.z();
            const double u = ctx.intrinsics.f * p.x() / z + ctx.intrinsics.px;
            const double v = ctx.intrinsics.f * p.y() / z + ctx.intrinsics.py;
            const double du = u - gt.joints2d(2 * j, t);
            const double dv = v - gt.joints2d(2 * j + 1, t);
            out.j2d += (du * du + dv * dv) / n_j2d;

            const double gu = weights.j2d * 2.0 / n_j2d * du;
            const double gv = weights.j2d * 2.0 / n_j2d * dv;
            Vec3& g = d_cam[static_cast<std::size_t>(j)];
            g.x() += gu * ctx.intrinsics.f / z;
            g.y() += gv * ctx.intrinsics.f / z;
            if (!clamped) {
              g.z() += -ctx.intrinsics.f / (z * z) * (gu * p.x() + gv * p.y());
            }
          }
        }

        if (weights.v3d != 0.0) {
          for (Eigen::Index p = 0; p < n_points; ++p) {
            Vec3 pt = Vec3::Zero();
            if (a == nullptr) {
              pt = cam[static_cast<std::size_t>(p)];
            } else {
              for (int j = 0; j < n_joints; ++j) {
                pt += (*a)(p, j) * cam[static_cast<std::size_t>(j)];
              }
            }
            const Vec3 diff = pt - gt.points3d.col(t).segment<3>(3 * p);
            out.v3d += diff.squaredNorm() / n_v3d;
            const Vec3 g = weights.v3d * 2.0 / n_v3d * diff;
            if (a == nullptr) {
              d_cam[static_cast<std::size_t>(p)] += g;
            } else {
              for (int j = 0; j < n_joints; ++j) {
                d_cam[static_cast<std::size_t>(j)] += (*a)(p, j) * g;
              }
            }
          }
        }

        if (grads != nullptr) {
          Mat3 d_rot = Mat3::Zero();
          Vec3 d_tau = Vec3::Zero();
          for (int j = 0; j < n_joints; ++j) {
            const Vec3& g = d_cam[static_cast<std::size_t>(j)];
            d_rot += g * fk.positions[static_cast<std::size_t>(j)].transpose();
            d_tau += g;
            d_local[static_cast<std::size_t>(j)] += gamma_c.matrix().transpose() * g;
          }
          grads->d_raw[static_cast<std::size_t>(Task::gamma_c)].col(t) +=
              decode_6d_backward(gc6, d_rot);

          // Restore-translation chain: tau depends on (s, tx, ty).
          const double s = weak(0);
          const double b = bbox(2);
          const double k = 2.0 / (s * b);
          Eigen::Vector3d d_weak = Eigen::Vector3d::Zero();
          d_weak(1) = d_tau.x();
          d_weak(2) = d_tau.y();
          d_weak(0) = -(k / s) * ((bbox(0) - ctx.intrinsics.px) * d_tau.x() +
                                  (bbox(1) - ctx.intrinsics.py) * d_tau.y() +
                                  ctx.intrinsics.f * d_tau.z());
          grads->d_raw[static_cast<std::size_t>(Task::weak_cam)].col(t) += d_weak;
        }
      }

      if (grads != nullptr) {
        fk_backward_theta(skel, theta, fk, d_local,
                          grads->d_raw[static_cast<std::size_t>(Task::theta)].col(t));
      }
    }
  }

  out.total = weights.v_root * out.v_root + weights.gamma_gv * out.gamma_gv +
              weights.smpl * out.smpl + weights.j3d * out.j3d + weights.j2d * out.j2d +
              weights.v3d * out.v3d + weights.stationary * out.stationary;
  return out;
}

}  // namespace gvm::model
