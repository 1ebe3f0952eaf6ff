#include "gvm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gvm/errors.hpp"
#include "gvm/gv_geometry.hpp"
#include "gvm/random.hpp"

namespace gvm::synth {

namespace {

const Vec3 kGravityWorld(0.0, -1.0, 0.0);  // y-up world
const Vec3 kUpWorld(0.0, 1.0, 0.0);

CameraMode require_mode(const std::string& name) {
  if (name == "static") {
    return CameraMode::static_cam;
  }
  if (name == "orbit") {
    return CameraMode::orbit;
  }
  if (name == "handheld") {
    return CameraMode::handheld;
  }
  throw BadConfig("unknown camera mode '" + name + "' (static|orbit|handheld)");
}

// Minimal rotation taking unit vector a onto unit vector b.
Rotation min_rotation(const Vec3& a, const Vec3& b) {
  const Vec3 axis = a.cross(b);
  const double s = axis.norm();
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  if (s < 1e-12) {
    if (c > 0.0) {
      return Rotation::identity();
    }
    // Antipodal: rotate by pi about any axis orthogonal to a.
    const Vec3 seed = std::abs(a.y()) < 0.9 ? Vec3(0.0, 1.0, 0.0) : Vec3(1.0, 0.0, 0.0);
    const Vec3 ortho = (seed - a.dot(seed) * a).normalized();
    return Rotation::from_axis_angle(ortho * std::numbers::pi);
  }
  return Rotation::from_axis_angle(axis / s * std::atan2(s, c));
}

Rotation yaw_world(double psi) {
  // Rotation about the world up axis; +psi turns +z toward +x.
  return Rotation::from_axis_angle(Vec3(0.0, psi, 0.0));
}

// World-to-camera rotation for a camera at `eye` looking at `target`,
// x right / y down / z forward.
Rotation look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(kUpWorld);
  if (x.norm() < 1e-9) {
    x = Vec3(1.0, 0.0, 0.0);
  } else {
    x.normalize();
  }
  const Vec3 y = z.cross(x).normalized();
  Mat3 m;
  m.row(0) = x;
  m.row(1) = y;
  m.row(2) = z;
  return Rotation::from_matrix(m, 1e-9);
}

// Catmull-Rom through the waypoints, then resampled to constant speed.
class RootPath {
 public:
  RootPath(const std::vector<Vec3>& waypoints, double total_length_m, int frames) {
    const int dense = std::max(frames * 8, 2048);
    std::vector<Vec3> pts(static_cast<std::size_t>(dense));
    std::vector<double> arc(static_cast<std::size_t>(dense), 0.0);
    const auto n = static_cast<int>(waypoints.size());
    auto wp = [&](int i) { return waypoints[static_cast<std::size_t>(std::clamp(i, 0, n - 1))]; };
    for (int i = 0; i < dense; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(dense - 1) *
                       static_cast<double>(n - 1);
      const int seg = std::min(static_cast<int>(u), n - 2);
      const double s = u - seg;
      const Vec3 p0 = wp(seg - 1);
      const Vec3 p1 = wp(seg);
      const Vec3 p2 = wp(seg + 1);
      const Vec3 p3 = wp(seg + 2);
      pts[static_cast<std::size_t>(i)] =
          0.5 * ((2.0 * p1) + (-p0 + p2) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s +
                 (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s * s);
    }
    for (int i = 1; i < dense; ++i) {
      arc[static_cast<std::size_t>(i)] =
          arc[static_cast<std::size_t>(i - 1)] +
          (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(i - 1)]).norm();
    }
    const double scale = total_length_m / arc.back();
    for (auto& p : pts) {
      p *= scale;
    }
    for (auto& a : arc) {
      a *= scale;
    }
    pts_ = std::move(pts);
    arc_ = std::move(arc);
  }

  // Position at arc length s (clamped).
  Vec3 at(double s) const {
    s = std::clamp(s, 0.0, arc_.back());
    const auto it = std::lower_bound(arc_.begin(), arc_.end(), s);
    const auto hi = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(it - arc_.begin(), 1, static_cast<std::ptrdiff_t>(arc_.size() - 1)));
    const std::size_t lo = hi - 1;
    const double span = arc_[hi] - arc_[lo];
    const double w = span > 1e-12 ? (s - arc_[lo]) / span : 0.0;
    return pts_[lo] + w * (pts_[hi] - pts_[lo]);
  }

  Vec3 heading(double s) const {
    const double h = 0.05;
    Vec3 d = at(s + h) - at(s - h);
    d.y() = 0.0;
    const double n = d.norm();
    return n > 1e-9 ? Vec3(d / n) : Vec3(0.0, 0.0, 1.0);
  }

 private:
  std::vector<Vec3> pts_;
  std::vector<double> arc_;
};

struct LegChain {
  int hip, knee, ankle, foot;
  double l1, l2;
  Vec3 knee_dir_local, ankle_dir_local, foot_dir_local;  // rest offset directions
  double foot_len;
};

LegChain leg_chain(const Skeleton& skel, bool left) {
  LegChain c;
  c.hip = left ? 1 : 2;
  c.knee = left ? 4 : 5;
  c.ankle = left ? 7 : 8;
  c.foot = left ? 10 : 11;
  c.l1 = skel.joint(c.knee).offset.norm();
  c.l2 = skel.joint(c.ankle).offset.norm();
  c.knee_dir_local = skel.joint(c.knee).offset.normalized();
  c.ankle_dir_local = skel.joint(c.ankle).offset.normalized();
  c.foot_dir_local = skel.joint(c.foot).offset.normalized();
  c.foot_len = skel.joint(c.foot).offset.norm();
  return c;
}

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

}  // namespace

CameraMode camera_mode_from_string(const std::string& name) { return require_mode(name); }

std::string to_string(CameraMode mode) {
  switch (mode) {
    case CameraMode::static_cam:
      return "static";
    case CameraMode::orbit:
      return "orbit";
    case CameraMode::handheld:
      return "handheld";
  }
  return "?";
}

SynthBundle synth_sequence(std::uint64_t seed, const SynthConfig& config) {
  if (config.frames < 2) {
    throw BadConfig("synth_sequence: need at least 2 frames");
  }
  if (config.step_frames < 4 || config.stance_duty <= 0.0 || config.stance_duty >= 1.0 ||
      config.step_len <= 0.0 || config.fps <= 0.0) {
    throw BadConfig("synth_sequence: invalid gait parameters");
  }

  Rng rng(seed);
  const Skeleton skel = Skeleton::smpl24();
  const int frames = config.frames;
  const double speed = config.step_len * config.fps / static_cast<double>(config.step_frames);
  const double total_len = speed * static_cast<double>(frames) / config.fps;

  // Waypoints in a disc; the path is rescaled to the required arc length.
  std::vector<Vec3> waypoints;
  const int n_wp = 5;
  for (int i = 0; i < n_wp; ++i) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double radius = config.path_radius * (0.3 + 0.7 * rng.uniform());
    waypoints.emplace_back(radius * std::cos(angle) +
                               2.2 * config.path_radius * static_cast<double>(i),
                           0.0, radius * std::sin(angle));
  }
  const RootPath path(waypoints, total_len, frames);

  // Root track with a slight vertical bob.
  const double bob_amp = 0.010;
  const double bob_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<Vec3> root_pos(static_cast<std::size_t>(frames));
  std::vector<Rotation> root_rot(static_cast<std::size_t>(frames));
  std::vector<double> heading_yaw(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const double s = speed * static_cast<double>(t) / config.fps;
    Vec3 p = path.at(s);
    p.y() = config.root_height +
            bob_amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                   static_cast<double>(config.step_frames) +
                               bob_phase);
    root_pos[static_cast<std::size_t>(t)] = p;
    const Vec3 h = path.heading(s);
    heading_yaw[static_cast<std::size_t>(t)] = std::atan2(h.x(), h.z());
    root_rot[static_cast<std::size_t>(t)] = yaw_world(heading_yaw[static_cast<std::size_t>(t)]);
  }

  // Gait phases. A foot is planted during [cycle_start, cycle_start + stance_len).
  const int cycle = 2 * config.step_frames;
  const int stance_len = static_cast<int>(std::lround(config.stance_duty * cycle));
  const double ankle_height = 0.06;
  const double lift_height = 0.05;
  const double lateral = 0.08;

  struct FootModel {
    std::vector<Vec3> ankle;      // exact per frame
    std::vector<Vec3> toe;        // exact per frame
    std::vector<char> planted;    // stance flag
    std::vector<Vec3> toe_dir;    // unit direction of the foot offset per frame
  };

  auto plant_point = [&](int center_frame, double side) {
    const double s = speed * static_cast<double>(std::clamp(center_frame, 0, frames - 1)) /
                     config.fps;
    const Vec3 h = path.heading(s);
    const Vec3 perp(h.z(), 0.0, -h.x());
    Vec3 p = path.at(s) + side * lateral * perp;
    p.y() = ankle_height;
    return p;
  };

  auto build_foot = [&](bool left) {
    FootModel fm;
    fm.ankle.resize(static_cast<std::size_t>(frames));
    fm.toe.resize(static_cast<std::size_t>(frames));
    fm.planted.assign(static_cast<std::size_t>(frames), 0);
    fm.toe_dir.resize(static_cast<std::size_t>(frames));
    const double side = left ? 1.0 : -1.0;
    const int phase0 = left ? 0 : config.step_frames;
    const LegChain chain = leg_chain(skel, left);

    // Plant index k covers frames [k*cycle + phase0, ... + stance_len).
    const int k_min = -2;
    const int k_max = frames / cycle + 2;
    std::vector<Vec3> plants;
    std::vector<double> plant_yaw;
    for (int k = k_min; k <= k_max; ++k) {
      const int center = k * cycle + phase0 + stance_len / 2;
      plants.push_back(plant_point(center, side));
      const double s = speed * static_cast<double>(std::clamp(center, 0, frames - 1)) /
                       config.fps;
      const Vec3 h = path.heading(s);
      plant_yaw.push_back(std::atan2(h.x(), h.z()));
    }
    auto plant_of = [&](int k) { return plants[static_cast<std::size_t>(k - k_min)]; };
    auto yaw_of = [&](int k) { return plant_yaw[static_cast<std::size_t>(k - k_min)]; };

    for (int t = 0; t < frames; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      const int rel = t - phase0;
      const int k = static_cast<int>(std::floor(static_cast<double>(rel) /
                                                static_cast<double>(cycle)));
      const int into = rel - k * cycle;
      if (into < stance_len) {
        fm.planted[ti] = 1;
        fm.ankle[ti] = plant_of(k);
        fm.toe_dir[ti] = yaw_world(yaw_of(k)) * chain.foot_dir_local;
      } else {
        const double swing_len = static_cast<double>(cycle - stance_len);
        const double sfrac = static_cast<double>(into - stance_len + 1) / (swing_len + 1.0);
        const double e = smoothstep(sfrac);
        Vec3 p = plant_of(k) + e * (plant_of(k + 1) - plant_of(k));
        const double lift = std::sin(std::numbers::pi * sfrac);
        p.y() += lift_height * lift * lift;
        fm.ankle[ti] = p;
        const double yaw = yaw_of(k) + e * (yaw_of(k + 1) - yaw_of(k));
        fm.toe_dir[ti] = yaw_world(yaw) * chain.foot_dir_local;
      }
      fm.toe[ti] = fm.ankle[ti] + chain.foot_len * fm.toe_dir[ti];
    }
    return fm;
  };

  const FootModel left_foot = build_foot(true);
  const FootModel right_foot = build_foot(false);

  // Pose: analytic two-link leg IK toward the exact ankle targets, sinusoidal
  // arm swing, everything else at rest.
  const int n_joints = skel.joint_count();
  std::vector<std::vector<Vec3>> joint_rotations(
      static_cast<std::size_t>(frames),
      std::vector<Vec3>(static_cast<std::size_t>(n_joints - 1), Vec3::Zero()));
  std::vector<std::vector<Vec3>> joint_positions(static_cast<std::size_t>(frames));

  auto solve_leg = [&](int t, const LegChain& chain, const FootModel& fm,
                       std::vector<Vec3>& theta) {
    const auto ti = static_cast<std::size_t>(t);
    const Rotation& pelvis = root_rot[ti];
    const Vec3 hip = root_pos[ti] + pelvis * skel.joint(chain.hip).offset;
    const Vec3 target = fm.ankle[ti];
    Vec3 to_target = target - hip;
    double d = to_target.norm();
    const double d_max = 0.999 * (chain.l1 + chain.l2);
    const double d_min = 1.001 * std::abs(chain.l1 - chain.l2) + 1e-6;
    d = std::clamp(d, d_min, d_max);
    const Vec3 u = to_target.normalized();

    const Vec3 fwd = pelvis * Vec3(0.0, 0.0, 1.0);
    Vec3 bend_axis = u.cross(fwd);
    if (bend_axis.norm() < 1e-9) {
      bend_axis = pelvis * Vec3(1.0, 0.0, 0.0);
    }
    bend_axis.normalize();
    const double cos_alpha =
        std::clamp((chain.l1 * chain.l1 + d * d - chain.l2 * chain.l2) / (2.0 * chain.l1 * d),
                   -1.0, 1.0);
    const double alpha = std::acos(cos_alpha);
    const Vec3 v1 = Rotation::from_axis_angle(bend_axis * alpha) * u;
    const Vec3 knee = hip + chain.l1 * v1;
    const Vec3 v2 = (target - knee).normalized();

    const Rotation hip_global = min_rotation(pelvis * chain.knee_dir_local, v1) * pelvis;
    const Rotation knee_global = min_rotation(hip_global * chain.ankle_dir_local, v2) * hip_global;
    const Rotation ankle_global =
        min_rotation(knee_global * chain.foot_dir_local, fm.toe_dir[ti]) * knee_global;

    theta[static_cast<std::size_t>(chain.hip - 1)] =
        (pelvis.inverse() * hip_global).to_axis_angle();
    theta[static_cast<std::size_t>(chain.knee - 1)] =
        (hip_global.inverse() * knee_global).to_axis_angle();
    theta[static_cast<std::size_t>(chain.ankle - 1)] =
        (knee_global.inverse() * ankle_global).to_axis_angle();
  };

  const LegChain lchain = leg_chain(skel, true);
  const LegChain rchain = leg_chain(skel, false);
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    auto& theta = joint_rotations[ti];
    solve_leg(t, lchain, left_foot, theta);
    solve_leg(t, rchain, right_foot, theta);

    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) /
                         static_cast<double>(cycle);
    const double swing = 0.35 * std::sin(phase);
    theta[16 - 1] = Vec3(swing, 0.0, 0.0);         // left shoulder
    theta[17 - 1] = Vec3(-swing, 0.0, 0.0);        // right shoulder
    theta[18 - 1] = Vec3(0.25 + 0.1 * std::sin(phase), 0.0, 0.0);   // left elbow
    theta[19 - 1] = Vec3(0.25 - 0.1 * std::sin(phase), 0.0, 0.0);   // right elbow
    theta[3 - 1] = Vec3(0.03 * std::sin(phase), 0.0, 0.0);          // spine sway

    auto fk = forward_kinematics(skel, root_rot[ti], root_pos[ti], theta);
    // Candidate joints carry the exact analytic targets (bit-identical during
    // stance); forward kinematics reproduces them to rounding only.
    fk[static_cast<std::size_t>(lchain.ankle)] = left_foot.ankle[ti];
    fk[static_cast<std::size_t>(lchain.foot)] = left_foot.toe[ti];
    fk[static_cast<std::size_t>(rchain.ankle)] = right_foot.ankle[ti];
    fk[static_cast<std::size_t>(rchain.foot)] = right_foot.toe[ti];
    joint_positions[ti] = std::move(fk);
  }

  // Stationary probabilities over the candidate order (heels, toes, hands).
  Eigen::MatrixXd probs(frames, 6);
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const double pl = left_foot.planted[ti] ? 0.999 : 0.001;
    const double pr = right_foot.planted[ti] ? 0.999 : 0.001;
    probs(t, 0) = pl;
    probs(t, 1) = pr;
    probs(t, 2) = pl;
    probs(t, 3) = pr;
    probs(t, 4) = 0.001;
    probs(t, 5) = 0.001;
  }
  if (config.noise.stationary_flip_prob > 0.0) {
    for (int t = 0; t < frames; ++t) {
      for (int c = 0; c < 6; ++c) {
        if (rng.uniform() < config.noise.stationary_flip_prob) {
          probs(t, c) = 1.0 - probs(t, c);
        }
      }
    }
  }

  SynthBundle bundle;
  bundle.seed = seed;
  bundle.config = config;
  bundle.gt_motion.fps = config.fps;
  bundle.gt_motion.root_orientation = root_rot;
  bundle.gt_motion.root_translation = root_pos;
  bundle.gt_motion.joint_rotations = std::move(joint_rotations);
  bundle.gt_motion.joint_positions = std::move(joint_positions);
  bundle.gt_motion.stationary_probs = std::move(probs);

  bundle.contact.resize(static_cast<std::size_t>(frames), std::vector<char>(2, 0));
  for (int t = 0; t < frames; ++t) {
    bundle.contact[static_cast<std::size_t>(t)][0] = left_foot.planted[static_cast<std::size_t>(t)];
    bundle.contact[static_cast<std::size_t>(t)][1] =
        right_foot.planted[static_cast<std::size_t>(t)];
  }

  // Camera track.
  const Vec3 scene_center = 0.5 * (path.at(0.0) + path.at(total_len)) + Vec3(0.0, 1.0, 0.0);
  const double orbit_radius = 3.5 + rng.uniform(0.0, 1.0);
  const double orbit_rate = (0.3 + 0.4 * rng.uniform()) * std::numbers::pi / 180.0;
  const double orbit_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double cam_height = 1.2 + 0.6 * rng.uniform();

  std::vector<Rotation> world_to_cam(static_cast<std::size_t>(frames));
  Vec3 ou_state = Vec3::Zero();
  const double ou_decay = std::exp(-1.0 / (0.5 * config.fps));  // ~0.5 s time constant
  const double ou_sigma = 0.035;
  const double ou_mix = std::sqrt(1.0 - ou_decay * ou_decay);
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    Vec3 eye;
    Vec3 target;
    switch (config.camera_mode) {
      case CameraMode::static_cam:
        eye = scene_center + Vec3(orbit_radius * std::cos(orbit_phase), cam_height - 1.0,
                                  orbit_radius * std::sin(orbit_phase));
        target = scene_center;
        break;
      case CameraMode::orbit:
      case CameraMode::handheld: {
        const double a = orbit_phase + orbit_rate * static_cast<double>(t);
        eye = Vec3(root_pos[ti].x() + orbit_radius * std::cos(a), cam_height,
                   root_pos[ti].z() + orbit_radius * std::sin(a));
        target = root_pos[ti];
        break;
      }
    }
    Rotation c = look_at(eye, target);
    if (config.camera_mode == CameraMode::handheld) {
      ou_state = ou_decay * ou_state +
                 ou_mix * ou_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
      c = Rotation::from_axis_angle(ou_state) * c;
    }
    world_to_cam[ti] = c;
  }

  bundle.camera.fps = config.fps;
  bundle.camera.gravity_cam0 = world_to_cam[0] * kGravityWorld;
  bundle.camera.world_to_camera.reserve(static_cast<std::size_t>(frames));
  bundle.camera.relative.reserve(static_cast<std::size_t>(frames));
  std::vector<Rotation> r_delta_clean(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    bundle.camera.world_to_camera.push_back(world_to_cam[ti].to_quaternion());
    if (t > 0) {
      r_delta_clean[ti] = world_to_cam[ti] * world_to_cam[ti - 1].inverse();
    }
    bundle.camera.relative.push_back(r_delta_clean[ti].to_quaternion());
  }

  // Exact derived targets.
  bundle.gamma_c.resize(static_cast<std::size_t>(frames));
  bundle.gamma_gv.resize(static_cast<std::size_t>(frames));
  bundle.v_root.assign(static_cast<std::size_t>(frames), Vec3::Zero());
  bundle.gravity_cam.resize(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    bundle.gravity_cam[ti] = world_to_cam[ti] * kGravityWorld;
    bundle.gamma_c[ti] = world_to_cam[ti] * root_rot[ti];
    const GvBasis basis = build_gv_basis(bundle.gravity_cam[ti]);
    bundle.gamma_gv[ti] = orientation_to_gv(bundle.gamma_c[ti], basis);
    if (t + 1 < frames) {
      bundle.v_root[ti] = root_rot[ti].inverse() * (root_pos[static_cast<std::size_t>(t + 1)] -
                                                    root_pos[ti]);
    }
  }
  bundle.world_to_gv0 = build_gv_basis(bundle.gravity_cam[0]).r_c2gv * world_to_cam[0];
  bundle.gauge_origin = root_pos[0];

  // Reported relatives: clean camera relatives plus optional tilt/yaw noise.
  bundle.r_delta = r_delta_clean;
  if (config.noise.r_delta_tilt_deg > 0.0 || config.noise.r_delta_yaw_deg > 0.0) {
    const double deg = std::numbers::pi / 180.0;
    for (int t = 1; t < frames; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      Rotation noise;
      if (config.noise.r_delta_tilt_deg > 0.0) {
        const Vec3 g = bundle.gravity_cam[ti];
        Vec3 axis = g.cross(rng.unit_vector());
        while (axis.norm() < 1e-6) {
          axis = g.cross(rng.unit_vector());
        }
        axis.normalize();
        const double angle = rng.uniform(0.0, config.noise.r_delta_tilt_deg * deg);
        noise = Rotation::from_axis_angle(axis * angle) * noise;
      }
      if (config.noise.r_delta_yaw_deg > 0.0) {
        const double angle =
            rng.uniform(-config.noise.r_delta_yaw_deg, config.noise.r_delta_yaw_deg) * deg;
        noise = Rotation::from_axis_angle(bundle.gravity_cam[ti] * angle) * noise;
      }
      bundle.r_delta[ti] = noise * r_delta_clean[ti];
    }
  }

  return bundle;
}

std::vector<model::FrameFeatures> make_frame_features(const SynthBundle& bundle,
                                                      const model::ModelConfig& config,
                                                      Rng& rng) {
  const int frames = bundle.gt_motion.frame_count();
  const auto& intr = bundle.camera.intrinsics;
  const auto world_to_cam = bundle.camera.absolute_rotations();
  std::vector<model::FrameFeatures> out(static_cast<std::size_t>(frames));

  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const auto& joints = bundle.gt_motion.joint_positions[ti];
    const int kp = std::min<int>(config.keypoints, static_cast<int>(joints.size()));

    // Fixed camera position 4 m back along the optical axis keeps the
    // subject in front of the camera; only rotations matter downstream.
    const Vec3 cam_pos = bundle.gt_motion.root_translation[ti] -
                         world_to_cam[ti].inverse() * Vec3(0.0, 0.0, 4.0);

    Eigen::MatrixXd px(kp, 2);
    for (int j = 0; j < kp; ++j) {
      const Vec3 cam = world_to_cam[ti] * (joints[static_cast<std::size_t>(j)] - cam_pos);
      const double z = std::max(cam.z(), 0.1);
      px(j, 0) = intr.f * cam.x() / z + intr.px;
      px(j, 1) = intr.f * cam.y() / z + intr.py;
    }
    const double cx = 0.5 * (px.col(0).maxCoeff() + px.col(0).minCoeff());
    const double cy = 0.5 * (px.col(1).maxCoeff() + px.col(1).minCoeff());
    const double size = std::max(px.col(0).maxCoeff() - px.col(0).minCoeff(),
                                 px.col(1).maxCoeff() - px.col(1).minCoeff()) *
                            1.2 +
                        1e-6;

    model::FrameFeatures f;
    f.bbox = Eigen::Vector3d(cx / intr.width, cy / intr.height, size / intr.width);
    f.keypoints = Eigen::MatrixXd::Zero(config.keypoints, 3);
    for (int j = 0; j < kp; ++j) {
      double u = 2.0 * (px(j, 0) - cx) / size;
      double v = 2.0 * (px(j, 1) - cy) / size;
      if (bundle.config.noise.keypoint_jitter > 0.0) {
        u += bundle.config.noise.keypoint_jitter * rng.normal();
        v += bundle.config.noise.keypoint_jitter * rng.normal();
      }
      f.keypoints(j, 0) = std::clamp(u, -1.5, 1.5);
      f.keypoints(j, 1) = std::clamp(v, -1.5, 1.5);
      f.keypoints(j, 2) = 1.0;
    }
    f.image_feature = Eigen::VectorXd::Zero(config.image_feature_dim);
    f.cam_rot = model::encode_rotation_6d(bundle.r_delta[ti]);
    out[ti] = f;
  }
  return out;
}

}  // namespace gvm::synth
