#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "gvm/checkpoint.hpp"
#include "gvm/errors.hpp"
#include "gvm/ik.hpp"
#include "gvm/metrics.hpp"
#include "gvm/model.hpp"
#include "gvm/motion_io.hpp"
#include "gvm/postprocess.hpp"
#include "gvm/random.hpp"
#include "gvm/skeleton.hpp"
#include "gvm/synth.hpp"
#include "gvm/trajectory.hpp"

namespace {

using namespace gvm;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

// GVMOTION_VERBOSE=1 turns on progress chatter on stderr.
bool verbose() {
  static const bool on = [] {
    const char* env = std::getenv("GVMOTION_VERBOSE");
    return env != nullptr && env[0] != '\0' && env[0] != '0';
  }();
  return on;
}

void vlog(const std::string& message) {
  if (verbose()) {
    std::cerr << "[gvmotion] " << message << "\n";
  }
}

void require_json_format(const std::string& format) {
  if (format != "json") {
    throw BadConfig("--format: only 'json' is supported, got '" + format + "'");
  }
}

// Optional JSON overrides for the generator: any subset of the config fields.
void apply_synth_config(const std::string& path, synth::SynthConfig& config,
                        std::string& camera_mode) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open config: " + path);
  }
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.contains("frames")) config.frames = j["frames"].get<int>();
  if (j.contains("fps")) config.fps = j["fps"].get<double>();
  if (j.contains("camera_mode")) camera_mode = j["camera_mode"].get<std::string>();
  if (j.contains("step_len")) config.step_len = j["step_len"].get<double>();
  if (j.contains("step_frames")) config.step_frames = j["step_frames"].get<int>();
  if (j.contains("stance_duty")) config.stance_duty = j["stance_duty"].get<double>();
  if (j.contains("root_height")) config.root_height = j["root_height"].get<double>();
  if (j.contains("path_radius")) config.path_radius = j["path_radius"].get<double>();
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (n.contains("r_delta_tilt_deg"))
      config.noise.r_delta_tilt_deg = n["r_delta_tilt_deg"].get<double>();
    if (n.contains("r_delta_yaw_deg"))
      config.noise.r_delta_yaw_deg = n["r_delta_yaw_deg"].get<double>();
    if (n.contains("keypoint_jitter"))
      config.noise.keypoint_jitter = n["keypoint_jitter"].get<double>();
    if (n.contains("stationary_flip_prob"))
      config.noise.stationary_flip_prob = n["stationary_flip_prob"].get<double>();
  }
}

Skeleton skeleton_by_name(const std::string& name) {
  if (name == "smpl24") {
    return Skeleton::smpl24();
  }
  throw BadConfig("--skeleton: unknown skeleton '" + name + "' (available: smpl24)");
}

metrics::JointTrack joint_track_of(const io::MotionFile& file, const Skeleton& skel,
                                   const char* role) {
  const int frames = file.frame_count();
  metrics::JointTrack track(static_cast<std::size_t>(frames));
  const MotionSequence seq = file.to_sequence();
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    std::vector<Vec3> joints;
    if (file.joint_positions.empty()) {
      if (static_cast<int>(seq.joint_rotations[ti].size()) != skel.joint_count() - 1) {
        throw ShapeMismatch(std::string(role) + ": frame " + std::to_string(t) + " has " +
                            std::to_string(seq.joint_rotations[ti].size()) +
                            " joint rotations, expected " +
                            std::to_string(skel.joint_count() - 1));
      }
      joints = forward_kinematics(skel, seq.root_orientation[ti], seq.root_translation[ti],
                                  seq.joint_rotations[ti]);
    } else {
      joints = file.joint_positions[ti];
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(joints.size()), 3);
    for (std::size_t j = 0; j < joints.size(); ++j) {
      m.row(static_cast<Eigen::Index>(j)) = joints[j].transpose();
    }
    track[ti] = std::move(m);
  }
  return track;
}

int run_synth(std::uint64_t seed, synth::SynthConfig config, const std::string& output) {
  vlog("generating " + std::to_string(config.frames) + " frames (seed " +
       std::to_string(seed) + ")");
  const synth::SynthBundle bundle = synth::synth_sequence(seed, config);

  io::MotionFile motion = io::MotionFile::from_sequence(bundle.gt_motion);
  io::save_motion(output + ".motion.json", motion);
  io::save_camera(output + ".camera.json", bundle.camera);

  io::GvTrackFile track;
  track.fps = config.fps;
  for (int t = 0; t < config.frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    track.gamma_gv.push_back(bundle.gamma_gv[ti].to_quaternion());
    track.gamma_c.push_back(bundle.gamma_c[ti].to_quaternion());
  }
  track.v_root = bundle.v_root;
  track.joint_rotations = bundle.gt_motion.joint_rotations;
  track.stationary_probs = bundle.gt_motion.stationary_probs;
  io::save_gv_track(output + ".gvtrack.json", track);

  std::cout << "wrote " << output << ".motion.json, .camera.json, .gvtrack.json ("
            << config.frames << " frames, " << synth::to_string(config.camera_mode)
            << " camera)\n";
  return kExitOk;
}

int run_recover(const std::string& input, const std::string& camera_path,
                const std::string& output, const std::string& skeleton_name) {
  vlog("loading " + input + " and " + camera_path);
  const io::GvTrackFile track = io::load_gv_track(input);
  const io::CameraFile camera = io::load_camera(camera_path);
  if (camera.frame_count() != track.frame_count()) {
    throw ShapeMismatch("recover: " + input + " has " + std::to_string(track.frame_count()) +
                        " frames but " + camera_path + " has " +
                        std::to_string(camera.frame_count()));
  }

  TrajectoryInputs inputs;
  inputs.gamma_gv = track.gamma_gv_rotations();
  inputs.gamma_c = track.gamma_c_rotations();
  inputs.r_delta = camera.relative_rotations();
  inputs.v_root = track.v_root;
  inputs.fps = track.fps;
  const WorldTrajectory world = recover_global_trajectory(inputs);

  MotionSequence out;
  out.fps = track.fps;
  out.root_orientation = world.orientation;
  out.root_translation = world.translation;
  if (!track.joint_rotations.empty()) {
    out.joint_rotations = track.joint_rotations;
    const Skeleton skel = skeleton_by_name(skeleton_name);
    out.joint_positions.resize(static_cast<std::size_t>(track.frame_count()));
    for (int t = 0; t < track.frame_count(); ++t) {
      const auto ti = static_cast<std::size_t>(t);
      out.joint_positions[ti] = forward_kinematics(skel, out.root_orientation[ti],
                                                   out.root_translation[ti],
                                                   out.joint_rotations[ti]);
    }
  } else {
    out.joint_rotations.assign(static_cast<std::size_t>(track.frame_count()), {});
  }
  out.stationary_probs = track.stationary_probs;
  io::save_motion(output, io::MotionFile::from_sequence(out, skeleton_name));
  std::cout << "recovered " << track.frame_count() << " frames -> " << output << "\n";
  return kExitOk;
}

int run_refine(const std::string& input, const std::string& output,
               const std::string& skeleton_name, const PostprocessParams& params) {
  const io::MotionFile file = io::load_motion(input);
  const Skeleton skel = skeleton_by_name(skeleton_name);
  const MotionSequence refined = postprocess_motion(file.to_sequence(), skel, params);
  io::save_motion(output, io::MotionFile::from_sequence(refined, skeleton_name));
  std::cout << "refined " << file.frame_count() << " frames -> " << output << "\n";
  return kExitOk;
}

int run_eval(const std::string& pred_path, const std::string& gt_path, const std::string& output,
             int segment_len, const std::string& contact_from,
             const std::string& skeleton_name) {
  const io::MotionFile pred = io::load_motion(pred_path);
  const io::MotionFile gt = io::load_motion(gt_path);
  if (pred.frame_count() != gt.frame_count()) {
    throw ShapeMismatch("eval: frame counts differ: " + pred_path + " has " +
                        std::to_string(pred.frame_count()) + ", " + gt_path + " has " +
                        std::to_string(gt.frame_count()));
  }
  const Skeleton skel = skeleton_by_name(skeleton_name);
  const metrics::JointTrack pred_track = joint_track_of(pred, skel, "eval: prediction");
  const metrics::JointTrack gt_track = joint_track_of(gt, skel, "eval: ground truth");

  metrics::MetricsReport report;
  report.segment_len = segment_len;
  report.pa_mpjpe_mm = metrics::pa_mpjpe(pred_track, gt_track);
  report.mpjpe_mm = metrics::mpjpe(pred_track, gt_track);
  if (pred.frame_count() >= 3) {
    report.accel_m_s2 = metrics::accel_error(pred_track, gt_track, gt.fps);
  }
  report.wa_mpjpe_100_mm =
      metrics::segmented_world_mpjpe(pred_track, gt_track, segment_len,
                                     metrics::SegmentAlign::whole);
  report.w_mpjpe_100_mm =
      metrics::segmented_world_mpjpe(pred_track, gt_track, segment_len,
                                     metrics::SegmentAlign::first_two);
  const MotionSequence pred_seq = pred.to_sequence();
  const MotionSequence gt_seq = gt.to_sequence();
  report.rte_percent = metrics::rte(pred_seq.root_translation, gt_seq.root_translation);
  if (pred.frame_count() >= 4) {
    report.jitter_m_s3 = metrics::jitter(pred_track, gt.fps);
  }

  // Foot sliding of the predicted toe joints during ground-truth contact.
  const int l_foot = skel.index_of("left_foot");
  const int r_foot = skel.index_of("right_foot");
  std::vector<std::vector<Vec3>> pred_feet(pred_track.size());
  std::vector<std::vector<Vec3>> gt_feet(gt_track.size());
  for (std::size_t t = 0; t < pred_track.size(); ++t) {
    pred_feet[t] = {pred_track[t].row(l_foot).transpose(),
                    pred_track[t].row(r_foot).transpose()};
    gt_feet[t] = {gt_track[t].row(l_foot).transpose(), gt_track[t].row(r_foot).transpose()};
  }
  try {
    if (contact_from == "height") {
      report.contact_source = "height_30mm";
      report.foot_sliding_mm = metrics::foot_sliding_from_heights(pred_feet, gt_feet, gt.fps);
    } else if (gt.stationary_probs.size() > 0) {
      // Candidate order: heels, toes, hands; toes are columns 2 and 3.
      std::vector<std::vector<char>> mask(gt_feet.size(), std::vector<char>(2, 0));
      for (Eigen::Index t = 0; t < gt.stationary_probs.rows(); ++t) {
        mask[static_cast<std::size_t>(t)][0] = gt.stationary_probs(t, 2) > 0.5 ? 1 : 0;
        mask[static_cast<std::size_t>(t)][1] = gt.stationary_probs(t, 3) > 0.5 ? 1 : 0;
      }
      report.contact_source = "mask";
      report.foot_sliding_mm = metrics::foot_sliding(pred_feet, mask, gt.fps);
    }
  } catch (const NoContactFrames&) {
    // No contact in the clip: the metric stays absent and flagged by omission.
  }

  const std::string json = report.to_json();
  if (output.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream os(output);
    if (!os) {
      throw IoError("cannot open file for writing: " + output);
    }
    os << json << "\n";
    std::cout << "report -> " << output << "\n";
  }
  return kExitOk;
}

int run_attend_demo(std::uint64_t seed, int frames, int dim, int layers, int heads,
                    int train_len, const std::string& checkpoint_path) {
  model::ModelConfig config;
  config.model_dim = dim;
  config.layers = layers;
  config.heads = heads;
  config.train_len = train_len;
  config.mlp_hidden = 2 * dim;
  config.fusion_hidden = dim;
  config.head_hidden = dim;
  config.validate();

  model::ModelParams params = model::init_params(config, seed);
  if (!checkpoint_path.empty()) {
    model::save_checkpoint(checkpoint_path, config, params);
    params = model::load_checkpoint(checkpoint_path).params;
  }

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<model::FrameFeatures> feats(static_cast<std::size_t>(frames));
  for (auto& f : feats) {
    f.bbox = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    f.keypoints.resize(config.keypoints, 3);
    for (Eigen::Index i = 0; i < f.keypoints.size(); ++i) {
      f.keypoints(i) = rng.uniform(-1.0, 1.0);
    }
    f.image_feature = Eigen::VectorXd::Zero(config.image_feature_dim);
    f.cam_rot = model::encode_rotation_6d(
        Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 0.1)));
  }

  model::ForwardTrace trace;
  const model::MultiTaskOutput out = model::model_forward(config, params, feats, &trace);
  std::printf("tokens    %+.12e\n", model::tensor_checksum(trace.tokens));
  std::printf("encoded   %+.12e\n", model::tensor_checksum(trace.encoded));
  for (int t = 0; t < model::kTaskCount; ++t) {
    std::printf("%-9s %+.12e\n", model::task_name(static_cast<model::Task>(t)),
                model::tensor_checksum(out.raw[static_cast<std::size_t>(t)]));
  }
  return kExitOk;
}

int run_ik_solve(const std::string& skeleton_name, const std::vector<std::string>& target_specs,
                 int max_iter, double tol) {
  const Skeleton skel = skeleton_by_name(skeleton_name);
  std::vector<IkTarget> targets;
  for (const std::string& spec : target_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw BadConfig("--target: expected joint=x,y,z, got '" + spec + "'");
    }
    IkTarget target;
    target.joint = skel.index_of(spec.substr(0, eq));
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    if (std::sscanf(spec.c_str() + eq + 1, "%lf,%lf,%lf", &x, &y, &z) != 3) {
      throw BadConfig("--target: expected joint=x,y,z, got '" + spec + "'");
    }
    target.position = Vec3(x, y, z);
    targets.push_back(target);
  }
  if (targets.empty()) {
    throw BadConfig("--target: at least one target is required");
  }

  std::vector<Vec3> theta(static_cast<std::size_t>(skel.joint_count() - 1), Vec3::Zero());
  IkParams params;
  params.max_iter = max_iter;
  params.tol = tol;
  const IkResult result =
      ccd_ik_solve(skel, Rotation::identity(), Vec3::Zero(), theta, targets, params);

  const auto fk = forward_kinematics(skel, Rotation::identity(), Vec3::Zero(), result.theta);
  std::printf("converged: %s after %d iterations\n", result.converged ? "yes" : "no",
              result.iterations);
  for (const IkTarget& t : targets) {
    const double err = (fk[static_cast<std::size_t>(t.joint)] - t.position).norm();
    std::printf("%-16s error %.6f m\n", skel.joint(t.joint).name.c_str(), err);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gravity-view world-grounded motion toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic ground-truth sequence");
  std::uint64_t seed = 0;
  synth::SynthConfig synth_config;
  std::string camera_mode = "orbit";
  std::string output_prefix = "synth";
  synth_cmd->add_option("--seed", seed, "RNG seed");
  synth_cmd->add_option("--frames", synth_config.frames, "sequence length");
  synth_cmd->add_option("--fps", synth_config.fps, "frames per second");
  synth_cmd->add_option("--camera-mode", camera_mode, "static|orbit|handheld");
  synth_cmd->add_option("--noise-tilt-deg", synth_config.noise.r_delta_tilt_deg,
                        "per-frame tilt noise injected into the reported relative rotations");
  synth_cmd->add_option("--noise-yaw-deg", synth_config.noise.r_delta_yaw_deg,
                        "per-frame yaw noise injected into the reported relative rotations");
  synth_cmd->add_option("--noise-keypoint", synth_config.noise.keypoint_jitter,
                        "keypoint jitter in crop units");
  synth_cmd->add_option("--noise-stationary-flip", synth_config.noise.stationary_flip_prob,
                        "probability of flipping a stationary label");
  synth_cmd->add_option("--output", output_prefix, "output path prefix");
  std::string synth_config_path;
  std::string format = "json";
  synth_cmd->add_option("--config", synth_config_path, "json file with generator overrides");
  synth_cmd->add_option("--format", format, "output format (json)");

  // recover
  auto* recover_cmd = app.add_subcommand("recover", "recover the world trajectory");
  std::string rec_input;
  std::string rec_camera;
  std::string rec_output = "recovered.motion.json";
  std::string skeleton_name = "smpl24";
  recover_cmd->add_option("--input", rec_input, "gv_track json")->required();
  recover_cmd->add_option("--camera", rec_camera, "camera json")->required();
  recover_cmd->add_option("--output", rec_output, "output motion json");
  recover_cmd->add_option("--skeleton", skeleton_name, "skeleton name");
  recover_cmd->add_option("--format", format, "output format (json)");

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "stationary-joint post-processing");
  std::string ref_input;
  std::string ref_output = "refined.motion.json";
  std::string ref_skeleton = "smpl24";
  PostprocessParams post_params;
  refine_cmd->add_option("--input", ref_input, "motion json")->required();
  refine_cmd->add_option("--output", ref_output, "output motion json");
  refine_cmd->add_option("--skeleton", ref_skeleton, "skeleton name");
  refine_cmd->add_option("--contact-threshold", post_params.contact_threshold,
                         "stationary probability gate");
  refine_cmd->add_option("--ik-iters", post_params.ik.max_iter, "CCD outer iterations");
  refine_cmd->add_option("--ik-tol", post_params.ik.tol, "CCD per-target tolerance, meters");
  refine_cmd->add_option("--format", format, "output format (json)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a prediction against ground truth");
  std::string eval_pred;
  std::string eval_gt;
  std::string eval_output;
  std::string eval_skeleton = "smpl24";
  std::string contact_from = "mask";
  int segment_len = 100;
  eval_cmd->add_option("--input", eval_pred, "predicted motion json")->required();
  eval_cmd->add_option("--gt", eval_gt, "ground-truth motion json")->required();
  eval_cmd->add_option("--output", eval_output, "report json (stdout when omitted)");
  eval_cmd->add_option("--segment-len", segment_len, "segment length for world errors");
  eval_cmd->add_option("--contact-from", contact_from, "mask|height");
  eval_cmd->add_option("--skeleton", eval_skeleton, "skeleton name");
  eval_cmd->add_option("--format", format, "output format (json)");

  // attend-demo
  auto* demo_cmd = app.add_subcommand("attend-demo", "run the seeded toy transformer");
  std::uint64_t demo_seed = 1;
  int demo_frames = 32;
  int demo_dim = 64;
  int demo_layers = 2;
  int demo_heads = 2;
  int demo_train_len = 16;
  std::string demo_checkpoint;
  demo_cmd->add_option("--seed", demo_seed, "RNG seed");
  demo_cmd->add_option("--frames", demo_frames, "sequence length");
  demo_cmd->add_option("--dim", demo_dim, "token dimension");
  demo_cmd->add_option("--layers", demo_layers, "encoder layers");
  demo_cmd->add_option("--heads", demo_heads, "attention heads");
  demo_cmd->add_option("--train-len", demo_train_len, "receptive-field half-width L");
  demo_cmd->add_option("--checkpoint", demo_checkpoint,
                       "write and reload a parameter checkpoint at this path");

  // ik-solve
  auto* ik_cmd = app.add_subcommand("ik-solve", "solve single-frame position targets");
  std::string ik_skeleton = "smpl24";
  std::vector<std::string> ik_targets;
  int ik_max_iter = 50;
  double ik_tol = 1e-3;
  ik_cmd->add_option("--skeleton", ik_skeleton, "skeleton name");
  ik_cmd->add_option("--target", ik_targets, "joint=x,y,z (repeatable)");
  ik_cmd->add_option("--max-iter", ik_max_iter, "outer iteration cap");
  ik_cmd->add_option("--tol", ik_tol, "per-target tolerance, meters");

  try {
    app.parse(argc, argv);
    if (*synth_cmd) {
      require_json_format(format);
      if (!synth_config_path.empty()) {
        apply_synth_config(synth_config_path, synth_config, camera_mode);
      }
      synth_config.camera_mode = synth::camera_mode_from_string(camera_mode);
      return run_synth(seed, synth_config, output_prefix);
    }
    if (*recover_cmd) {
      require_json_format(format);
      return run_recover(rec_input, rec_camera, rec_output, skeleton_name);
    }
    if (*refine_cmd) {
      require_json_format(format);
      return run_refine(ref_input, ref_output, ref_skeleton, post_params);
    }
    if (*eval_cmd) {
      require_json_format(format);
      if (contact_from != "mask" && contact_from != "height") {
        throw BadConfig("--contact-from must be 'mask' or 'height'");
      }
      return run_eval(eval_pred, eval_gt, eval_output, segment_len, contact_from, eval_skeleton);
    }
    if (*demo_cmd) {
      return run_attend_demo(demo_seed, demo_frames, demo_dim, demo_layers, demo_heads,
                             demo_train_len, demo_checkpoint);
    }
    if (*ik_cmd) {
      return run_ik_solve(ik_skeleton, ik_targets, ik_max_iter, ik_tol);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
