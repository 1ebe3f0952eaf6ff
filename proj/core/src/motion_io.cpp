#include "gvm/motion_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gvm/errors.hpp"

namespace gvm::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kQuatNormTol = 1e-6;
constexpr double kConsistencyTol = 1e-6;

json load_json(const std::string& path, const char* expected_format) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open file: " + path);
  }
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.contains("format") || j["format"] != expected_format) {
    throw ParseError(path + ": expected format '" + expected_format + "'");
  }
  if (!j.contains("version")) {
    throw ParseError(path + ": missing track 'version'");
  }
  if (j["version"].get<int>() != 1) {
    throw VersionUnsupported(path + ": version " + std::to_string(j["version"].get<int>()));
  }
  return j;
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot open file for writing: " + path);
  }
  os << j.dump(1) << "\n";
  if (!os) {
    throw IoError("short write: " + path);
  }
}

ordered_json vec3_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j, const std::string& track) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("track '" + track + "' must hold 3-vectors");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

ordered_json quat_json(const Quat& q) { return ordered_json::array({q.w, q.x, q.y, q.z}); }

Quat quat_from(const json& j, const std::string& track) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError("track '" + track + "' must hold quaternions (w, x, y, z)");
  }
  Quat q{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  const double norm = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (std::abs(norm - 1.0) > kQuatNormTol) {
    throw NormViolation("track '" + track + "': quaternion norm " + std::to_string(norm));
  }
  return q;
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) {
    throw ParseError(path + ": missing track '" + key + "'");
  }
  return j.at(key);
}

void require_frames(std::size_t got, std::size_t want, const char* track,
                    const std::string& path) {
  if (got != want) {
    throw ParseError(path + ": track '" + track + "' has " + std::to_string(got) +
                     " frames, expected " + std::to_string(want));
  }
}

std::vector<Quat> quat_track(const json& j, const char* track) {
  std::vector<Quat> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    out.push_back(quat_from(e, track));
  }
  return out;
}

std::vector<Vec3> vec3_track(const json& j, const char* track) {
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    out.push_back(vec3_from(e, track));
  }
  return out;
}

std::vector<std::vector<Vec3>> nested_vec3_track(const json& j, const char* track) {
  std::vector<std::vector<Vec3>> out;
  out.reserve(j.size());
  for (const auto& frame : j) {
    std::vector<Vec3> row;
    row.reserve(frame.size());
    for (const auto& e : frame) {
      row.push_back(vec3_from(e, track));
    }
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json nested_vec3_json(const std::vector<std::vector<Vec3>>& track) {
  ordered_json out = ordered_json::array();
  for (const auto& frame : track) {
    ordered_json row = ordered_json::array();
    for (const auto& v : frame) {
      row.push_back(vec3_json(v));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_track(const json& j, const char* track) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (r == 0) {
      out.resize(rows, static_cast<Eigen::Index>(row.size()));
    } else if (static_cast<Eigen::Index>(row.size()) != out.cols()) {
      throw ParseError(std::string("track '") + track + "' has ragged rows");
    }
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return out;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

Quat quat_of(const Rotation& r) { return r.to_quaternion(); }

MotionSequence MotionFile::to_sequence() const {
  MotionSequence seq;
  seq.fps = fps;
  seq.root_orientation.reserve(root_orientation.size());
  for (const Quat& q : root_orientation) {
    seq.root_orientation.push_back(Rotation::from_quaternion(q));
  }
  seq.root_translation = root_translation;
  seq.joint_rotations = joint_rotations;
  seq.joint_positions = joint_positions;
  seq.stationary_probs = stationary_probs;
  return seq;
}

MotionFile MotionFile::from_sequence(const MotionSequence& motion, std::string skeleton_name) {
  MotionFile file;
  file.fps = motion.fps;
  file.skeleton = std::move(skeleton_name);
  file.root_orientation.reserve(motion.root_orientation.size());
  for (const Rotation& r : motion.root_orientation) {
    file.root_orientation.push_back(r.to_quaternion());
  }
  file.root_translation = motion.root_translation;
  file.joint_rotations = motion.joint_rotations;
  file.joint_positions = motion.joint_positions;
  file.stationary_probs = motion.stationary_probs;
  return file;
}

MotionFile load_motion(const std::string& path) {
  const json j = load_json(path, "gvmotion/motion");
  MotionFile file;
  file.fps = require(j, "fps", path).get<double>();
  file.skeleton = require(j, "skeleton", path).get<std::string>();
  file.root_orientation =
      quat_track(require(j, "root_orientation_quat_wxyz", path), "root_orientation_quat_wxyz");
  file.root_translation =
      vec3_track(require(j, "root_translation_m", path), "root_translation_m");
  file.joint_rotations = nested_vec3_track(require(j, "joint_rotations_axis_angle", path),
                                           "joint_rotations_axis_angle");
  const auto frames = file.root_orientation.size();
  require_frames(file.root_translation.size(), frames, "root_translation_m", path);
  require_frames(file.joint_rotations.size(), frames, "joint_rotations_axis_angle", path);
  if (j.contains("joint_positions_m")) {
    file.joint_positions = nested_vec3_track(j["joint_positions_m"], "joint_positions_m");
    require_frames(file.joint_positions.size(), frames, "joint_positions_m", path);
  }
  if (j.contains("stationary_probs")) {
    file.stationary_probs = matrix_track(j["stationary_probs"], "stationary_probs");
    require_frames(static_cast<std::size_t>(file.stationary_probs.rows()), frames,
                   "stationary_probs", path);
    if ((file.stationary_probs.array() < 0.0).any() ||
        (file.stationary_probs.array() > 1.0).any()) {
      throw ParseError(path + ": stationary_probs outside [0, 1]");
    }
  }
  return file;
}

void save_motion(const std::string& path, const MotionFile& file) {
  ordered_json j;
  j["format"] = "gvmotion/motion";
  j["version"] = file.version;
  j["fps"] = file.fps;
  j["skeleton"] = file.skeleton;
  ordered_json quats = ordered_json::array();
  for (const Quat& q : file.root_orientation) {
    quats.push_back(quat_json(q));
  }
  j["root_orientation_quat_wxyz"] = std::move(quats);
  ordered_json trans = ordered_json::array();
  for (const Vec3& v : file.root_translation) {
    trans.push_back(vec3_json(v));
  }
  j["root_translation_m"] = std::move(trans);
  j["joint_rotations_axis_angle"] = nested_vec3_json(file.joint_rotations);
  if (!file.joint_positions.empty()) {
    j["joint_positions_m"] = nested_vec3_json(file.joint_positions);
  }
  if (file.stationary_probs.size() > 0) {
    j["stationary_probs"] = matrix_json(file.stationary_probs);
  }
  write_json(path, j);
}

std::vector<Rotation> CameraFile::absolute_rotations() const {
  std::vector<Rotation> out;
  if (!world_to_camera.empty()) {
    out.reserve(world_to_camera.size());
    for (const Quat& q : world_to_camera) {
      out.push_back(Rotation::from_quaternion(q));
    }
    return out;
  }
  // Chain relatives from the identity.
  out.resize(relative.size());
  for (std::size_t t = 1; t < relative.size(); ++t) {
    out[t] = Rotation::from_quaternion(relative[t]) * out[t - 1];
  }
  return out;
}

std::vector<Rotation> CameraFile::relative_rotations() const {
  std::vector<Rotation> out;
  if (!relative.empty()) {
    out.reserve(relative.size());
    for (const Quat& q : relative) {
      out.push_back(Rotation::from_quaternion(q));
    }
    return out;
  }
  out.resize(world_to_camera.size());
  for (std::size_t t = 1; t < world_to_camera.size(); ++t) {
    out[t] = Rotation::from_quaternion(world_to_camera[t]) *
             Rotation::from_quaternion(world_to_camera[t - 1]).inverse();
  }
  return out;
}

CameraFile load_camera(const std::string& path) {
  const json j = load_json(path, "gvmotion/camera");
  CameraFile file;
  file.fps = require(j, "fps", path).get<double>();
  const json& intr = require(j, "intrinsics", path);
  file.intrinsics.f = require(intr, "f", path).get<double>();
  file.intrinsics.px = require(intr, "px", path).get<double>();
  file.intrinsics.py = require(intr, "py", path).get<double>();
  file.intrinsics.width = require(intr, "width", path).get<int>();
  file.intrinsics.height = require(intr, "height", path).get<int>();
  file.gravity_cam0 = vec3_from(require(j, "gravity_cam0", path), "gravity_cam0");
  if (std::abs(file.gravity_cam0.norm() - 1.0) > kQuatNormTol) {
    throw NormViolation(path + ": gravity_cam0 must be unit length");
  }
  if (j.contains("world_to_camera_quat_wxyz")) {
    file.world_to_camera =
        quat_track(j["world_to_camera_quat_wxyz"], "world_to_camera_quat_wxyz");
  }
  if (j.contains("relative_rotation_quat_wxyz")) {
    file.relative = quat_track(j["relative_rotation_quat_wxyz"], "relative_rotation_quat_wxyz");
  }
  if (file.world_to_camera.empty() && file.relative.empty()) {
    throw ParseError(path + ": missing track 'world_to_camera_quat_wxyz' or "
                            "'relative_rotation_quat_wxyz'");
  }
  if (!file.world_to_camera.empty() && !file.relative.empty()) {
    require_frames(file.relative.size(), file.world_to_camera.size(),
                   "relative_rotation_quat_wxyz", path);
    for (std::size_t t = 1; t < file.world_to_camera.size(); ++t) {
      const Rotation derived = Rotation::from_quaternion(file.world_to_camera[t]) *
                               Rotation::from_quaternion(file.world_to_camera[t - 1]).inverse();
      const Rotation stored = Rotation::from_quaternion(file.relative[t]);
      if (geodesic_angle(derived, stored) > kConsistencyTol) {
        throw ParseError(path + ": absolute and relative rotations disagree at frame " +
                         std::to_string(t));
      }
    }
  }
  return file;
}

void save_camera(const std::string& path, const CameraFile& file) {
  ordered_json j;
  j["format"] = "gvmotion/camera";
  j["version"] = file.version;
  j["fps"] = file.fps;
  j["intrinsics"] = {{"f", file.intrinsics.f},
                     {"px", file.intrinsics.px},
                     {"py", file.intrinsics.py},
                     {"width", file.intrinsics.width},
                     {"height", file.intrinsics.height}};
  j["gravity_cam0"] = vec3_json(file.gravity_cam0);
  if (!file.world_to_camera.empty()) {
    ordered_json q = ordered_json::array();
    for (const Quat& e : file.world_to_camera) {
      q.push_back(quat_json(e));
    }
    j["world_to_camera_quat_wxyz"] = std::move(q);
  }
  if (!file.relative.empty()) {
    ordered_json q = ordered_json::array();
    for (const Quat& e : file.relative) {
      q.push_back(quat_json(e));
    }
    j["relative_rotation_quat_wxyz"] = std::move(q);
  }
  write_json(path, j);
}

std::vector<Rotation> GvTrackFile::gamma_gv_rotations() const {
  std::vector<Rotation> out;
  out.reserve(gamma_gv.size());
  for (const Quat& q : gamma_gv) {
    out.push_back(Rotation::from_quaternion(q));
  }
  return out;
}

std::vector<Rotation> GvTrackFile::gamma_c_rotations() const {
  std::vector<Rotation> out;
  out.reserve(gamma_c.size());
  for (const Quat& q : gamma_c) {
    out.push_back(Rotation::from_quaternion(q));
  }
  return out;
}

GvTrackFile load_gv_track(const std::string& path) {
  const json j = load_json(path, "gvmotion/gv_track");
  GvTrackFile file;
  file.fps = require(j, "fps", path).get<double>();
  file.gamma_gv = quat_track(require(j, "gamma_gv_quat_wxyz", path), "gamma_gv_quat_wxyz");
  file.gamma_c = quat_track(require(j, "gamma_c_quat_wxyz", path), "gamma_c_quat_wxyz");
  file.v_root = vec3_track(require(j, "v_root_m", path), "v_root_m");
  const auto frames = file.gamma_gv.size();
  require_frames(file.gamma_c.size(), frames, "gamma_c_quat_wxyz", path);
  require_frames(file.v_root.size(), frames, "v_root_m", path);
  if (j.contains("joint_rotations_axis_angle")) {
    file.joint_rotations =
        nested_vec3_track(j["joint_rotations_axis_angle"], "joint_rotations_axis_angle");
    require_frames(file.joint_rotations.size(), frames, "joint_rotations_axis_angle", path);
  }
  if (j.contains("stationary_probs")) {
    file.stationary_probs = matrix_track(j["stationary_probs"], "stationary_probs");
    require_frames(static_cast<std::size_t>(file.stationary_probs.rows()), frames,
                   "stationary_probs", path);
  }
  return file;
}

void save_gv_track(const std::string& path, const GvTrackFile& file) {
  ordered_json j;
  j["format"] = "gvmotion/gv_track";
  j["version"] = file.version;
  j["fps"] = file.fps;
  ordered_json gv = ordered_json::array();
  for (const Quat& q : file.gamma_gv) {
    gv.push_back(quat_json(q));
  }
  j["gamma_gv_quat_wxyz"] = std::move(gv);
  ordered_json gc = ordered_json::array();
  for (const Quat& q : file.gamma_c) {
    gc.push_back(quat_json(q));
  }
  j["gamma_c_quat_wxyz"] = std::move(gc);
  ordered_json vr = ordered_json::array();
  for (const Vec3& v : file.v_root) {
    vr.push_back(vec3_json(v));
  }
  j["v_root_m"] = std::move(vr);
  if (!file.joint_rotations.empty()) {
    j["joint_rotations_axis_angle"] = nested_vec3_json(file.joint_rotations);
  }
  if (file.stationary_probs.size() > 0) {
    j["stationary_probs"] = matrix_json(file.stationary_probs);
  }
  write_json(path, j);
}

}  // namespace gvm::io
