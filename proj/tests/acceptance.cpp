// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gvm/gv_geometry.hpp"
#include "gvm/ik.hpp"
#include "gvm/losses.hpp"
#include "gvm/metrics.hpp"
#include "gvm/model.hpp"
#include "gvm/motion_io.hpp"
#include "gvm/optimizer.hpp"
#include "gvm/postprocess.hpp"
#include "gvm/random.hpp"
#include "gvm/skeleton.hpp"
#include "gvm/synth.hpp"
#include "gvm/trajectory.hpp"

using namespace gvm;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) {
    ++g_failures;
  }
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
void criterion_round_trip() {
  double max_ori = 0.0;
  double max_tau = 0.0;
  double recover_seconds = 0.0;
  for (int seq = 0; seq < 20; ++seq) {
    synth::SynthConfig config;
    config.frames = 300;
    config.camera_mode = (seq % 2 == 0) ? synth::CameraMode::orbit : synth::CameraMode::handheld;
    const synth::SynthBundle bundle = synth::synth_sequence(1000 + seq, config);

    TrajectoryInputs inputs;
    inputs.gamma_gv = bundle.gamma_gv;
    inputs.gamma_c = bundle.gamma_c;
    inputs.r_delta = bundle.r_delta;
    inputs.v_root = bundle.v_root;

    const auto t0 = std::chrono::steady_clock::now();
    const WorldTrajectory rec = recover_global_trajectory(inputs);
    recover_seconds += seconds_since(t0);

    for (int t = 0; t < config.frames; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      const Rotation expect_ori = bundle.world_to_gv0 * bundle.gt_motion.root_orientation[ti];
      const Vec3 expect_tau =
          bundle.world_to_gv0 * (bundle.gt_motion.root_translation[ti] - bundle.gauge_origin);
      max_ori = std::max(max_ori, geodesic_angle(rec.orientation[ti], expect_ori));
      max_tau = std::max(max_tau, (rec.translation[ti] - expect_tau).norm());
    }
  }
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "round trip over 20 sequences: max orientation error %.3e rad, max translation "
                "error %.3e m, recovery time %.3f s",
                max_ori, max_tau, recover_seconds);
  report(1, max_ori < 1e-6 && max_tau < 1e-6 && recover_seconds < 1.0, detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_gravity_drift() {
  synth::SynthConfig config;
  config.frames = 3000;
  config.camera_mode = synth::CameraMode::orbit;
  config.noise.r_delta_tilt_deg = 5.0;
  const synth::SynthBundle bundle = synth::synth_sequence(77, config);

  TrajectoryInputs inputs;
  inputs.gamma_gv = bundle.gamma_gv;
  inputs.gamma_c = bundle.gamma_c;
  inputs.r_delta = bundle.r_delta;
  inputs.v_root = bundle.v_root;
  const WorldTrajectory rec = recover_global_trajectory(inputs);

  std::ofstream csv("gravity_drift_curve.csv");
  csv << "frame,gv_tilt_rad,naive_tilt_rad\n";

  // Tilt measured as atan2(|g x ey|, g . ey): well conditioned near zero,
  // unlike the arccos form.
  auto tilt_from = [](const Vec3& g, const Vec3& ref) {
    return std::atan2(g.cross(ref).norm(), g.dot(ref));
  };

  const std::vector<Rotation> r_delta_gv =
      gv_relative_track(inputs.gamma_c, inputs.gamma_gv, inputs.r_delta);

  double max_gv_tilt = 0.0;
  double naive_final = 0.0;
  Rotation yaw_prefix;
  Rotation chain;
  const Vec3 ey(0.0, 1.0, 0.0);
  const Vec3 g0 = bundle.gravity_cam[0];
  for (int t = 0; t < config.frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (t > 0) {
      yaw_prefix = yaw_prefix * r_delta_gv[ti];
      chain = inputs.r_delta[ti] * chain;
    }
    const double gv_tilt = tilt_from(yaw_prefix * ey, ey);
    max_gv_tilt = std::max(max_gv_tilt, gv_tilt);

    const Vec3 g_naive = chain.inverse() * bundle.gravity_cam[ti];
    const double naive_tilt = tilt_from(g_naive, g0);
    naive_final = naive_tilt;
    csv << t << "," << gv_tilt << "," << naive_tilt << "\n";
  }
  // The recovered orientations embed the same yaw prefix; spot-check they
  // carry no gravity tilt either.
  for (int t = 0; t < config.frames; t += 97) {
    const auto ti = static_cast<std::size_t>(t);
    const Vec3 g_rec = rec.orientation[ti] * (bundle.gamma_gv[ti].inverse() * ey);
    max_gv_tilt = std::max(max_gv_tilt, tilt_from(g_rec, ey));
  }

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "gravity drift over 3000 frames with 5 deg tilt noise: recovered tilt %.3e rad, "
                "naive chain final tilt %.3f deg (curve in gravity_drift_curve.csv)",
                max_gv_tilt, naive_final * 180.0 / std::numbers::pi);
  report(2, max_gv_tilt < 1e-9 && naive_final > std::numbers::pi / 180.0, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_rope_band() {
  model::ModelConfig config;
  config.layers = 2;
  config.heads = 2;
  config.model_dim = 32;
  config.mlp_hidden = 48;
  config.train_len = 16;
  config.fusion_hidden = 24;
  config.head_hidden = 24;
  config.keypoints = 5;
  config.image_feature_dim = 6;
  const model::ModelParams params = model::init_params(config, 33);
  Rng rng(34);

  const int frames = 4 * config.train_len;
  Eigen::MatrixXd tokens(config.model_dim, frames);
  for (Eigen::Index i = 0; i < tokens.size(); ++i) {
    tokens(i) = rng.normal();
  }
  std::vector<int> positions(static_cast<std::size_t>(frames));
  std::vector<int> shifted(static_cast<std::size_t>(frames));
  for (int i = 0; i < frames; ++i) {
    positions[static_cast<std::size_t>(i)] = i;
    shifted[static_cast<std::size_t>(i)] = i + 1000;
  }

  double max_shift_diff = 0.0;
  for (int head = 0; head < config.heads; ++head) {
    const Eigen::MatrixXd a = model::attention_logits(config, params.layers[0].attn, tokens,
                                                      tokens, positions, head);
    const Eigen::MatrixXd b = model::attention_logits(config, params.layers[0].attn, tokens,
                                                      tokens, shifted, head);
    max_shift_diff = std::max(max_shift_diff, (a - b).cwiseAbs().maxCoeff());
  }

  // Windowed recomputation of one masked attention layer: token t only sees
  // (t-L, t+L), so evaluating the window [max(0,t-L+1), min(T,t+L)) re-indexed
  // must reproduce the full-sequence output exactly.
  const int band = config.train_len;
  const Eigen::MatrixXd full = model::masked_self_attention(config, params.layers[0].attn,
                                                            tokens, positions, band, nullptr);
  double max_window_diff = 0.0;
  for (int t = 0; t < frames; ++t) {
    const int lo = std::max(0, t - band + 1);
    const int hi = std::min(frames, t + band);
    const Eigen::MatrixXd sub = tokens.middleCols(lo, hi - lo);
    std::vector<int> sub_pos(static_cast<std::size_t>(hi - lo));
    for (int i = 0; i < hi - lo; ++i) {
      sub_pos[static_cast<std::size_t>(i)] = i;
    }
    const Eigen::MatrixXd wout = model::masked_self_attention(config, params.layers[0].attn,
                                                              sub, sub_pos, band, nullptr);
    max_window_diff =
        std::max(max_window_diff, (full.col(t) - wout.col(t - lo)).cwiseAbs().maxCoeff());
  }

  // The full encoder stack obeys the layer-scaled reach as well.
  model::TokenSequence seq;
  seq.tokens = tokens;
  seq.positions = positions;
  const Eigen::MatrixXd stack = model::transformer_forward(config, params, seq);
  const int reach = config.layers * (band - 1);
  double max_stack_diff = 0.0;
  for (int t = 0; t < frames; t += 7) {
    const int lo = std::max(0, t - reach);
    const int hi = std::min(frames, t + reach + 1);
    model::TokenSequence sub;
    sub.tokens = tokens.middleCols(lo, hi - lo);
    sub.positions.resize(static_cast<std::size_t>(hi - lo));
    for (int i = 0; i < hi - lo; ++i) {
      sub.positions[static_cast<std::size_t>(i)] = i;
    }
    const Eigen::MatrixXd wout = model::transformer_forward(config, params, sub);
    max_stack_diff =
        std::max(max_stack_diff, (stack.col(t) - wout.col(t - lo)).cwiseAbs().maxCoeff());
  }

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "rope relativity and band locality: shift-by-1000 logit diff %.3e, windowed "
                "attention diff %.3e, windowed stack diff %.3e",
                max_shift_diff, max_window_diff, max_stack_diff);
  report(3, max_shift_diff < 1e-9 && max_window_diff < 1e-9 && max_stack_diff < 1e-9, detail);
}

// ---------------------------------------------------------------- criterion 4
void criterion_gradients() {
  model::ModelConfig config;
  config.layers = 2;
  config.heads = 2;
  config.model_dim = 16;
  config.mlp_hidden = 20;
  config.train_len = 4;
  config.fusion_hidden = 8;
  config.head_hidden = 12;
  config.keypoints = 4;
  config.image_feature_dim = 5;
  config.pose_joints = 23;

  const Skeleton skel = Skeleton::smpl24();
  const int frames = 6;
  Rng rng(44);

  model::ModelParams params = model::init_params(config, 44);
  // Keep the weak-camera scale output safely positive around +1.5.
  params.heads[static_cast<std::size_t>(model::Task::weak_cam)].fc2.w.row(0) *= 0.1;
  params.heads[static_cast<std::size_t>(model::Task::weak_cam)].fc2.b(0) = 1.5;

  std::vector<model::FrameFeatures> feats(static_cast<std::size_t>(frames));
  for (auto& f : feats) {
    f.bbox = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    f.keypoints.resize(config.keypoints, 3);
    for (Eigen::Index i = 0; i < f.keypoints.size(); ++i) {
      f.keypoints(i) = rng.uniform(-1.0, 1.0);
    }
    f.image_feature.resize(config.image_feature_dim);
    for (Eigen::Index i = 0; i < f.image_feature.size(); ++i) {
      f.image_feature(i) = rng.normal();
    }
    f.cam_rot = model::encode_rotation_6d(
        Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 0.1)));
  }

  model::LossTargets gt;
  auto fill = [&rng](Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, double scale) {
    m.resize(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m(i) = rng.normal() * scale;
    }
  };
  fill(gt.v_root, 3, frames, 0.1);
  fill(gt.gamma_gv, 6, frames, 1.0);
  fill(gt.theta, 3 * config.pose_joints, frames, 0.2);
  fill(gt.beta, 10, frames, 0.5);
  fill(gt.joints2d, 2 * skel.joint_count(), frames, 50.0);
  gt.joints2d.array() += 500.0;
  fill(gt.points3d, 3 * skel.joint_count(), frames, 0.3);
  gt.stationary.resize(config.stationary_joints, frames);
  for (Eigen::Index i = 0; i < gt.stationary.size(); ++i) {
    gt.stationary(i) = rng.uniform() < 0.5 ? 0.0 : 1.0;
  }

  model::LossContext ctx;
  ctx.skeleton = &skel;
  ctx.intrinsics.f = 1000.0;
  ctx.intrinsics.px = 640.0;
  ctx.intrinsics.py = 360.0;
  ctx.bbox.resize(3, frames);
  for (int t = 0; t < frames; ++t) {
    ctx.bbox.col(t) = Eigen::Vector3d(620.0 + 4.0 * t, 355.0, 230.0);
  }

  // All seven terms active; the 2D term is scaled so every term is O(1) and
  // the central difference stays well conditioned.
  model::LossWeights weights;
  weights.j2d = 1e-4;

  auto loss_of = [&](const model::ModelParams& p) {
    const model::MultiTaskOutput out = model::model_forward(config, p, feats);
    return model::compute_losses(config, out, gt, ctx, weights).total;
  };

  model::ForwardTrace trace;
  const model::MultiTaskOutput out = model::model_forward(config, params, feats, &trace);
  model::HeadGradients head_grads;
  const model::LossBreakdown breakdown =
      model::compute_losses(config, out, gt, ctx, weights, &head_grads);
  const bool all_terms_active = breakdown.v_root > 0.0 && breakdown.gamma_gv > 0.0 &&
                                breakdown.smpl > 0.0 && breakdown.j3d > 0.0 &&
                                breakdown.j2d > 0.0 && breakdown.v3d > 0.0 &&
                                breakdown.stationary > 0.0;
  const model::ModelParams grads = model::model_backward(config, params, trace, head_grads);

  std::vector<Eigen::Map<const Eigen::VectorXd>> grad_list;
  std::vector<std::string> names;
  model::visit_tensors(grads,
                       [&](const std::string& name, Eigen::Map<const Eigen::VectorXd> g) {
                         grad_list.push_back(g);
                         names.push_back(name);
                       });

  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_name;
  long checked = 0;
  std::size_t tensor_idx = 0;
  model::visit_tensors(params, [&](const std::string& name, Eigen::Map<Eigen::VectorXd> data) {
    const auto& g = grad_list[tensor_idx];
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double saved = data(i);
      data(i) = saved + h;
      const double up = loss_of(params);
      data(i) = saved - h;
      const double down = loss_of(params);
      data(i) = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = g(i);
      // Central differences of a ~O(1) loss carry ~5e-11 round-off; the 1e-5
      // floor keeps the comparison meaningful for near-zero gradients.
      const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-5});
      if (rel > worst) {
        worst = rel;
        worst_name = name;
      }
      ++checked;
    }
    ++tensor_idx;
  });

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "analytic vs central-difference gradients over %ld parameters (all 7 terms "
                "active=%s): worst relative error %.3e (%s)",
                checked, all_terms_active ? "yes" : "no", worst, worst_name.c_str());
  report(4, all_terms_active && worst < 1e-4, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_toy_training() {
  const auto t0 = std::chrono::steady_clock::now();

  model::ModelConfig config;
  config.layers = 2;
  config.heads = 2;
  config.model_dim = 32;
  config.mlp_hidden = 64;
  config.train_len = 16;
  config.fusion_hidden = 32;
  config.head_hidden = 32;
  config.keypoints = 5;
  config.image_feature_dim = 9;  // carries the perturbed targets
  const int frames = 16;
  const int n_seq = 8;

  // Denoising task: the image-feature channel carries gamma_gv (6D) and
  // v_root with additive noise; the heads must reproduce the clean values.
  struct Sample {
    std::vector<model::FrameFeatures> feats;
    model::LossTargets gt;
  };
  std::vector<Sample> dataset;
  Rng noise_rng(555);
  for (int s = 0; s < n_seq; ++s) {
    synth::SynthConfig sc;
    sc.frames = frames;
    sc.camera_mode = synth::CameraMode::orbit;
    const synth::SynthBundle bundle = synth::synth_sequence(900 + s, sc);
    Sample sample;
    sample.feats = synth::make_frame_features(bundle, config, noise_rng);
    sample.gt.v_root.resize(3, frames);
    sample.gt.gamma_gv.resize(6, frames);
    for (int t = 0; t < frames; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      sample.gt.gamma_gv.col(t) = model::encode_rotation_6d(bundle.gamma_gv[ti]);
      sample.gt.v_root.col(t) = bundle.v_root[ti];
      Eigen::VectorXd packed(9);
      packed.head<6>() = sample.gt.gamma_gv.col(t);
      packed.tail<3>() = sample.gt.v_root.col(t);
      for (Eigen::Index i = 0; i < packed.size(); ++i) {
        packed(i) += 0.1 * noise_rng.normal();
      }
      sample.feats[ti].image_feature = packed;
    }
    dataset.push_back(std::move(sample));
  }

  model::LossWeights weights;
  weights.smpl = weights.j3d = weights.j2d = weights.v3d = weights.stationary = 0.0;

  model::ModelParams params = model::init_params(config, 321);
  model::AdamOptimizer::Options opt;
  opt.lr = 2e-3;
  model::AdamOptimizer adam(params, opt);

  auto epoch_loss = [&](bool update) {
    double total = 0.0;
    for (const Sample& sample : dataset) {
      model::ForwardTrace trace;
      const model::MultiTaskOutput out =
          model::model_forward(config, params, sample.feats, &trace);
      model::HeadGradients head_grads;
      const model::LossBreakdown breakdown = model::compute_losses(
          config, out, sample.gt, model::LossContext{}, weights, update ? &head_grads : nullptr);
      total += breakdown.total;
      if (update) {
        const model::ModelParams grads =
            model::model_backward(config, params, trace, head_grads);
        adam.step(params, grads);
      }
    }
    return total / static_cast<double>(n_seq);
  };

  const double initial = epoch_loss(false);
  for (int step = 0; step < 500; ++step) {
    epoch_loss(true);
  }
  const double final_loss = epoch_loss(false);
  const double elapsed = seconds_since(t0);

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "toy fit of 8 length-16 sequences: loss %.4f -> %.4f (%.1f%% of initial) in "
                "%.1f s over 500 steps",
                initial, final_loss, 100.0 * final_loss / initial, elapsed);
  report(5, final_loss < 0.1 * initial && elapsed < 60.0, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_ccd() {
  std::vector<Joint> joints = {
      {"base", -1, {0, 0, 0}},     {"l0", 0, {0.0, 0.0, 0.05}}, {"l1", 1, {0.4, 0.0, 0.0}},
      {"l2", 2, {0.35, 0.0, 0.0}}, {"l3", 3, {0.3, 0.0, 0.0}},  {"tip", 4, {0.25, 0.0, 0.0}},
  };
  const Skeleton chain(std::move(joints), {});
  const Vec3 shoulder(0.0, 0.0, 0.05);
  const double reach = 0.4 + 0.35 + 0.3 + 0.25;

  Rng rng(66);
  int solved = 0;
  bool monotone = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 dir = rng.unit_vector();
    // Targets across the reachable annulus, away from the extension-singular
    // boundary where plain coordinate descent needs hundreds of sweeps.
    const double radius = rng.uniform(0.25 * reach, 0.90 * reach);
    const Vec3 target = shoulder + radius * dir;

    std::vector<Vec3> theta(5, Vec3::Zero());
    IkParams params;
    params.max_iter = 50;
    params.tol = 1e-3;
    const IkResult result = ccd_ik_solve(chain, Rotation::identity(), Vec3::Zero(), theta,
                                         std::vector<IkTarget>{{5, target}}, params);
    const auto fk = forward_kinematics(chain, Rotation::identity(), Vec3::Zero(), result.theta);
    if ((fk[5] - target).norm() < 1e-3) {
      ++solved;
    }
    for (std::size_t i = 1; i < result.error_history.size(); ++i) {
      monotone = monotone && result.error_history[i] <= result.error_history[i - 1] + 1e-12;
    }
  }
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "ccd on a 4-link chain: %d/100 random reachable targets solved to < 1e-3 m "
                "within 50 iterations, summed error monotone: %s",
                solved, monotone ? "yes" : "no");
  report(6, solved >= 95 && monotone, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_postprocess() {
  synth::SynthConfig config;
  config.frames = 240;
  config.camera_mode = synth::CameraMode::static_cam;
  const synth::SynthBundle bundle = synth::synth_sequence(88, config);
  const Skeleton skel = Skeleton::smpl24();

  // Inject a 10 mm/frame horizontal slide: the whole body drifts, so planted
  // feet drag across the ground while the stationary labels still say fixed.
  MotionSequence corrupted = bundle.gt_motion;
  Vec3 drift = Vec3::Zero();
  for (int t = 1; t < config.frames; ++t) {
    drift += Vec3(0.010, 0.0, 0.0);
    const auto ti = static_cast<std::size_t>(t);
    corrupted.root_translation[ti] += drift;
    for (auto& p : corrupted.joint_positions[ti]) {
      p += drift;
    }
  }

  auto toe_track = [&skel](const MotionSequence& motion) {
    std::vector<std::vector<Vec3>> feet(motion.root_orientation.size());
    for (std::size_t t = 0; t < feet.size(); ++t) {
      const auto fk = forward_kinematics(skel, motion.root_orientation[t],
                                         motion.root_translation[t], motion.joint_rotations[t]);
      feet[t] = {fk[10], fk[11]};
    }
    return feet;
  };
  auto joint_track = [&skel](const MotionSequence& motion) {
    metrics::JointTrack track(motion.root_orientation.size());
    for (std::size_t t = 0; t < track.size(); ++t) {
      const auto fk = forward_kinematics(skel, motion.root_orientation[t],
                                         motion.root_translation[t], motion.joint_rotations[t]);
      Eigen::MatrixXd m(static_cast<Eigen::Index>(fk.size()), 3);
      for (std::size_t j = 0; j < fk.size(); ++j) {
        m.row(static_cast<Eigen::Index>(j)) = fk[j].transpose();
      }
      track[t] = std::move(m);
    }
    return track;
  };

  const std::vector<std::vector<char>> mask(bundle.contact.begin(), bundle.contact.end());
  const double fs_before = metrics::foot_sliding(toe_track(corrupted), mask, config.fps);

  PostprocessParams params;
  params.ik.max_iter = 20;
  params.ik.tol = 1e-4;
  const MotionSequence refined = postprocess_motion(corrupted, skel, params);
  const double fs_after = metrics::foot_sliding(toe_track(refined), mask, config.fps);

  const metrics::JointTrack clean = joint_track(bundle.gt_motion);
  const double mpjpe_corrupted = metrics::mpjpe(joint_track(corrupted), clean);
  const double mpjpe_refined = metrics::mpjpe(joint_track(refined), clean);

  // Near-idempotence on clean data.
  const MotionSequence repost = postprocess_motion(bundle.gt_motion, skel, params);
  const double mpjpe_clean_repost = metrics::mpjpe(joint_track(repost), clean);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "post-processing: foot sliding %.2f -> %.2f mm (%.1f%% reduction), mpjpe vs "
                "clean %.2f -> %.2f mm, clean-input mpjpe drift %.3f mm",
                fs_before, fs_after, 100.0 * (1.0 - fs_after / fs_before), mpjpe_corrupted,
                mpjpe_refined, mpjpe_clean_repost);
  report(7,
         fs_after <= 0.2 * fs_before && mpjpe_refined <= mpjpe_corrupted + 5.0 &&
             mpjpe_clean_repost < 5.0,
         detail);
}

// ---------------------------------------------------------------- criterion 8
double transform_residual(const metrics::SimilarityTransform& xf, const Eigen::MatrixXd& p,
                          const Eigen::MatrixXd& q) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    sum += (xf.apply(p.row(i).transpose()) - q.row(i).transpose()).squaredNorm();
  }
  return sum;
}

double brute_force_residual(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, bool with_scale,
                            Rng& rng) {
  const Eigen::RowVector3d mu_p = p.colwise().mean();
  const Eigen::RowVector3d mu_q = q.colwise().mean();
  auto eval = [&](const Vec3& w, double log_s) {
    metrics::SimilarityTransform xf;
    xf.rotation = Rotation::from_axis_angle(w);
    xf.scale = with_scale ? std::exp(log_s) : 1.0;
    xf.translation = mu_q.transpose() - xf.scale * (xf.rotation.matrix() * mu_p.transpose());
    return transform_residual(xf, p, q);
  };
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 10; ++restart) {
    Vec3 w = restart == 0 ? Vec3::Zero() : Vec3(rng.unit_vector() * rng.uniform(0.0, 3.1));
    double ls = 0.0;
    double step = 0.5;
    double cur = eval(w, ls);
    while (step > 1e-9) {
      bool improved = false;
      for (int axis = 0; axis < 4; ++axis) {
        for (const double sign : {1.0, -1.0}) {
          Vec3 w2 = w;
          double ls2 = ls;
          if (axis < 3) {
            w2(axis) += sign * step;
          } else if (with_scale) {
            ls2 += sign * step;
          } else {
            continue;
          }
          const double val = eval(w2, ls2);
          if (val < cur - 1e-15) {
            cur = val;
            w = w2;
            ls = ls2;
            improved = true;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
      }
    }
    best = std::min(best, cur);
  }
  return best;
}

void criterion_metrics_oracles() {
  Rng rng(99);

  // Closed-form Umeyama vs the derivative-free minimizer on 50 clouds.
  double max_umeyama_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd p(24, 3);
    Eigen::MatrixXd q(24, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p(i) = rng.normal();
      q(i) = rng.normal();
    }
    const bool with_scale = trial % 2 == 0;
    const metrics::SimilarityTransform xf = metrics::umeyama_align(p, q, with_scale);
    const double closed = transform_residual(xf, p, q);
    const double brute = brute_force_residual(p, q, with_scale, rng);
    max_umeyama_gap = std::max(max_umeyama_gap, std::abs(closed - brute));
  }

  // PA-MPJPE invariance under similarity transforms of the predictions.
  metrics::JointTrack gt;
  for (int t = 0; t < 4; ++t) {
    Eigen::MatrixXd f(24, 3);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      f(i) = rng.normal();
    }
    gt.push_back(f);
  }
  metrics::JointTrack pred = gt;
  for (auto& f : pred) {
    f.array() += 0.03;
  }
  const double base = metrics::pa_mpjpe(pred, gt);
  double max_pa_diff = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Rotation r = Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 3.0));
    const double s = std::exp(rng.uniform(-1.0, 1.0));
    const Vec3 t(rng.normal(), rng.normal(), rng.normal());
    metrics::JointTrack moved = pred;
    for (auto& f : moved) {
      for (Eigen::Index i = 0; i < f.rows(); ++i) {
        f.row(i) = (s * (r * Vec3(f.row(i).transpose())) + t).transpose();
      }
    }
    max_pa_diff = std::max(max_pa_diff, std::abs(metrics::pa_mpjpe(moved, gt) - base));
  }

  // Jitter of exactly-representable constant-acceleration motion.
  metrics::JointTrack quad(32);
  for (int t = 0; t < 32; ++t) {
    Eigen::MatrixXd f(3, 3);
    const double tt = static_cast<double>(t);
    f.row(0) = Eigen::RowVector3d(0.25 * tt * tt, 1.5 * tt, -2.0);
    f.row(1) = Eigen::RowVector3d(-0.5 * tt * tt + 3.0 * tt, 0.0, 0.125 * tt * tt);
    f.row(2) = Eigen::RowVector3d(0.0, -0.75 * tt, 8.0);
    quad[static_cast<std::size_t>(t)] = f;
  }
  const double quad_jitter = metrics::jitter(quad, 30.0);

  // Segmented world errors vs a per-segment brute-force alignment.
  const int frames = 250;
  metrics::JointTrack gt_seq;
  metrics::JointTrack pred_seq;
  for (int t = 0; t < frames; ++t) {
    Eigen::MatrixXd f(6, 3);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      f(i) = rng.normal() * 0.2;
    }
    f.col(2).array() += 0.02 * t;
    gt_seq.push_back(f);
    const Rotation r = rot_about_y(0.004 * t);
    Eigen::MatrixXd g = f;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      g.row(i) = (r * Vec3(f.row(i).transpose()) + Vec3(0.001 * t, 0.0, 0.0)).transpose();
    }
    pred_seq.push_back(g);
  }

  double max_segment_gap = 0.0;
  for (const auto mode : {metrics::SegmentAlign::whole, metrics::SegmentAlign::first_two}) {
    const double fast = metrics::segmented_world_mpjpe(pred_seq, gt_seq, 100, mode);

    double sum = 0.0;
    std::size_t count = 0;
    for (int begin = 0; begin < frames; begin += 100) {
      const int end = std::min(frames, begin + 100);
      if (end - begin < 2) {
        break;
      }
      const int fit_end = mode == metrics::SegmentAlign::first_two ? begin + 2 : end;
      const Eigen::Index joints = pred_seq[0].rows();
      Eigen::MatrixXd p(static_cast<Eigen::Index>(fit_end - begin) * joints, 3);
      Eigen::MatrixXd q(p.rows(), 3);
      for (int t = begin; t < fit_end; ++t) {
        p.middleRows(static_cast<Eigen::Index>(t - begin) * joints, joints) =
            pred_seq[static_cast<std::size_t>(t)];
        q.middleRows(static_cast<Eigen::Index>(t - begin) * joints, joints) =
            gt_seq[static_cast<std::size_t>(t)];
      }
      // Brute-force rigid fit, then measure the whole segment under it.
      const Eigen::RowVector3d mu_p = p.colwise().mean();
      const Eigen::RowVector3d mu_q = q.colwise().mean();
      Vec3 w = Vec3::Zero();
      double step = 0.5;
      auto eval = [&](const Vec3& wv) {
        metrics::SimilarityTransform xf;
        xf.rotation = Rotation::from_axis_angle(wv);
        xf.translation = mu_q.transpose() - xf.rotation.matrix() * mu_p.transpose();
        return transform_residual(xf, p, q);
      };
      double cur = eval(w);
      while (step > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
          for (const double sign : {1.0, -1.0}) {
            Vec3 w2 = w;
            w2(axis) += sign * step;
            const double val = eval(w2);
            if (val < cur - 1e-16) {
              cur = val;
              w = w2;
              improved = true;
            }
          }
        }
        if (!improved) {
          step *= 0.5;
        }
      }
      metrics::SimilarityTransform xf;
      xf.rotation = Rotation::from_axis_angle(w);
      xf.translation = mu_q.transpose() - xf.rotation.matrix() * mu_p.transpose();
      for (int t = begin; t < end; ++t) {
        const auto& pf = pred_seq[static_cast<std::size_t>(t)];
        const auto& qf = gt_seq[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < pf.rows(); ++i) {
          sum += (xf.apply(pf.row(i).transpose()) - qf.row(i).transpose()).norm();
          ++count;
        }
      }
    }
    const double brute = 1000.0 * sum / static_cast<double>(count);
    max_segment_gap = std::max(max_segment_gap, std::abs(fast - brute));
  }

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "metric oracles: umeyama residual gap %.3e, pa-mpjpe invariance %.3e mm, "
                "constant-acceleration jitter %.1f, segmented alignment gap %.3e mm",
                max_umeyama_gap, max_pa_diff, quad_jitter, max_segment_gap);
  report(8,
         max_umeyama_gap < 1e-6 && max_pa_diff < 1e-9 && quad_jitter == 0.0 &&
             max_segment_gap < 1e-6,
         detail);
}

// ---------------------------------------------------------------- criterion 9
void criterion_rollout_indexing() {
  Rng rng(111);
  double max_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t frames = 2 + static_cast<std::size_t>(rng.uniform() * 40);
    std::vector<Rotation> gamma_gv(frames);
    std::vector<Rotation> r_delta_gv(frames);
    std::vector<Vec3> v_root(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      gamma_gv[t] = Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 3.0));
      if (t > 0) {
        r_delta_gv[t] = rot_about_y(rng.uniform(-2.0, 2.0));
      }
      v_root[t] = Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.2;
    }

    const auto ori = recover_world_orientations(gamma_gv, r_delta_gv);
    const auto tau = recover_world_translations(ori, v_root);

    // The printed formulas, evaluated with fresh loops per frame.
    for (std::size_t t = 0; t < frames; ++t) {
      Rotation prod;
      for (std::size_t i = 1; i <= t; ++i) {
        prod = prod * r_delta_gv[i];
      }
      const Rotation ori_ref = prod * gamma_gv[t];
      Vec3 tau_ref = Vec3::Zero();
      for (std::size_t i = 0; i + 1 <= t; ++i) {
        tau_ref += ori[i] * v_root[i];
      }
      max_gap = std::max(max_gap,
                         (ori[t].matrix() - ori_ref.matrix()).cwiseAbs().maxCoeff());
      max_gap = std::max(max_gap, (tau[t] - tau_ref).cwiseAbs().maxCoeff());
    }
  }
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "rollout indexing vs explicit sums/products on 100 random inputs: max gap %.3e",
                max_gap);
  report(9, max_gap < 1e-12, detail);
}

// --------------------------------------------------------------- criterion 10
void criterion_determinism_io() {
  // Bit-exact save/load round trip.
  Rng rng(121);
  io::MotionFile file;
  file.fps = 30.0;
  for (int t = 0; t < 6; ++t) {
    file.root_orientation.push_back(
        Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 3.0)).to_quaternion());
    file.root_translation.emplace_back(rng.normal(), rng.normal(), rng.normal());
    std::vector<Vec3> theta(23);
    for (auto& v : theta) {
      v = Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.4;
    }
    file.joint_rotations.push_back(std::move(theta));
  }
  io::save_motion("acc_roundtrip1.json", file);
  const io::MotionFile loaded = io::load_motion("acc_roundtrip1.json");
  bool exact = loaded.frame_count() == file.frame_count();
  for (int t = 0; exact && t < file.frame_count(); ++t) {
    const auto ti = static_cast<std::size_t>(t);
    exact = loaded.root_orientation[ti].w == file.root_orientation[ti].w &&
            loaded.root_orientation[ti].x == file.root_orientation[ti].x &&
            loaded.root_orientation[ti].y == file.root_orientation[ti].y &&
            loaded.root_orientation[ti].z == file.root_orientation[ti].z &&
            loaded.root_translation[ti].x() == file.root_translation[ti].x() &&
            loaded.root_translation[ti].y() == file.root_translation[ti].y() &&
            loaded.root_translation[ti].z() == file.root_translation[ti].z();
    for (std::size_t j = 0; exact && j < file.joint_rotations[ti].size(); ++j) {
      const Vec3& lhs = loaded.joint_rotations[ti][j];
      const Vec3& rhs = file.joint_rotations[ti][j];
      exact = lhs.x() == rhs.x() && lhs.y() == rhs.y() && lhs.z() == rhs.z();
    }
  }
  io::save_motion("acc_roundtrip2.json", loaded);
  auto slurp = [](const char* path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const bool file_stable = slurp("acc_roundtrip1.json") == slurp("acc_roundtrip2.json");
  std::remove("acc_roundtrip1.json");
  std::remove("acc_roundtrip2.json");

  // Same-seed pipelines are byte-identical end to end.
  bool pipeline_identical = true;
#ifdef GVM_CLI_PATH
  auto shell = [](const std::string& cmd) {
    return std::system((cmd + " >/dev/null 2>&1").c_str());
  };
  const std::string cli = GVM_CLI_PATH;
  pipeline_identical =
      shell(cli + " synth --seed 17 --frames 120 --camera-mode handheld --output acc_p1") == 0 &&
      shell(cli + " synth --seed 17 --frames 120 --camera-mode handheld --output acc_p2") == 0 &&
      shell(cli + " recover --input acc_p1.gvtrack.json --camera acc_p1.camera.json --output "
                  "acc_p1.rec.json") == 0 &&
      shell(cli + " recover --input acc_p2.gvtrack.json --camera acc_p2.camera.json --output "
                  "acc_p2.rec.json") == 0 &&
      slurp("acc_p1.motion.json") == slurp("acc_p2.motion.json") &&
      slurp("acc_p1.gvtrack.json") == slurp("acc_p2.gvtrack.json") &&
      slurp("acc_p1.rec.json") == slurp("acc_p2.rec.json");
  for (const char* f : {"acc_p1.motion.json", "acc_p1.camera.json", "acc_p1.gvtrack.json",
                        "acc_p1.rec.json", "acc_p2.motion.json", "acc_p2.camera.json",
                        "acc_p2.gvtrack.json", "acc_p2.rec.json"}) {
    std::remove(f);
  }
#else
  // Library-level fallback: regenerate a bundle and compare saved files.
  synth::SynthConfig config;
  config.frames = 60;
  const synth::SynthBundle a = synth::synth_sequence(17, config);
  const synth::SynthBundle b = synth::synth_sequence(17, config);
  io::save_motion("acc_d1.json", io::MotionFile::from_sequence(a.gt_motion));
  io::save_motion("acc_d2.json", io::MotionFile::from_sequence(b.gt_motion));
  pipeline_identical = slurp("acc_d1.json") == slurp("acc_d2.json");
  std::remove("acc_d1.json");
  std::remove("acc_d2.json");
#endif

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "determinism and io: save/load exact=%s, re-save byte-identical=%s, same-seed "
                "pipeline byte-identical=%s",
                exact ? "yes" : "no", file_stable ? "yes" : "no",
                pipeline_identical ? "yes" : "no");
  report(10, exact && file_stable && pipeline_identical, detail);
}

}  // namespace

int main() {
  criterion_round_trip();
  criterion_gravity_drift();
  criterion_rope_band();
  criterion_gradients();
  criterion_toy_training();
  criterion_ccd();
  criterion_postprocess();
  criterion_metrics_oracles();
  criterion_rollout_indexing();
  criterion_determinism_io();

  if (g_failures > 0) {
    std::printf("%d criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
