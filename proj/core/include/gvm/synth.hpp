#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gvm/model.hpp"
#include "gvm/motion.hpp"
#include "gvm/motion_io.hpp"
#include "gvm/random.hpp"
#include "gvm/rotmath.hpp"
#include "gvm/skeleton.hpp"

namespace gvm::synth {

enum class CameraMode { static_cam, orbit, handheld };

CameraMode camera_mode_from_string(const std::string& name);
std::string to_string(CameraMode mode);

struct NoiseConfig {
  double r_delta_tilt_deg = 0.0;  // per-frame tilt injected into the reported relatives
  double r_delta_yaw_deg = 0.0;
  double keypoint_jitter = 0.0;   // normalized crop units
  double stationary_flip_prob = 0.0;
};

struct SynthConfig {
  int frames = 300;
  double fps = 30.0;
  CameraMode camera_mode = CameraMode::orbit;
  NoiseConfig noise;

  // Gait shape. Defaults keep every stance ankle within the leg's reach.
  double step_len = 0.40;     // meters per step
  int step_frames = 16;       // frames per single step
  double stance_duty = 0.62;  // fraction of the gait cycle a foot is planted
  double root_height = 0.84;  // nominal pelvis height
  double path_radius = 2.5;   // waypoint disc radius
};

// Ground-truth world motion (y-up, gravity (0,-1,0)) with a simulated camera
// and the exact per-frame estimation targets. Everything regenerates
// bit-identically from (seed, config).
struct SynthBundle {
  std::uint64_t seed = 0;
  SynthConfig config;

  MotionSequence gt_motion;  // world frame, includes joint positions + stationary probs
  io::CameraFile camera;     // absolute world-to-camera track + clean relatives

  std::vector<Rotation> gamma_c;    // exact camera-frame body orientation
  std::vector<Rotation> gamma_gv;   // exact gravity-view body orientation
  std::vector<Vec3> v_root;         // exact body-frame root displacement (last = 0)
  std::vector<Vec3> gravity_cam;    // exact gravity direction per camera frame
  std::vector<Rotation> r_delta;    // reported relatives (clean + injected noise)
  std::vector<std::vector<char>> contact;  // frames x 2 (left, right), exact

  // Gauge linking the synthetic world to the frame-0 gravity-view system:
  // recovered orientation == world_to_gv0 * gt orientation, recovered
  // translation == world_to_gv0 * (gt translation - gauge_origin).
  Rotation world_to_gv0;
  Vec3 gauge_origin = Vec3::Zero();
};

SynthBundle synth_sequence(std::uint64_t seed, const SynthConfig& config);

// Projection-based per-frame features for the sequence model: crop from the
// projected joints, keypoints normalized to [-1, 1], zero image features and
// the 6D encoding of the reported relative rotation. Keypoint jitter is drawn
// from `rng` when the bundle's noise config asks for it.
std::vector<model::FrameFeatures> make_frame_features(const SynthBundle& bundle,
                                                      const model::ModelConfig& config,
                                                      Rng& rng);

}  // namespace gvm::synth
