#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gvm/camera.hpp"
#include "gvm/motion.hpp"
#include "gvm/rotmath.hpp"

namespace gvm::io {

// On-disk motion clip. Rotations are stored as unit quaternions (w, x, y, z);
// the struct keeps the stored values verbatim so that load -> save cycles are
// byte-identical, and derives matrices on demand.
struct MotionFile {
  int version = 1;
  double fps = 30.0;
  std::string skeleton = "smpl24";
  std::vector<Quat> root_orientation;
  std::vector<Vec3> root_translation;
  std::vector<std::vector<Vec3>> joint_rotations;
  std::vector<std::vector<Vec3>> joint_positions;  // optional
  Eigen::MatrixXd stationary_probs;                // optional, frames x candidates

  int frame_count() const { return static_cast<int>(root_orientation.size()); }
  MotionSequence to_sequence() const;
  static MotionFile from_sequence(const MotionSequence& motion,
                                  std::string skeleton_name = "smpl24");
};

// On-disk camera track: intrinsics, gravity in frame-0 camera coordinates and
// world-to-camera and/or consecutive relative rotations. When both rotation
// tracks are present they must agree within 1e-6.
struct CameraFile {
  int version = 1;
  double fps = 30.0;
  CameraIntrinsics intrinsics;
  Vec3 gravity_cam0 = Vec3(0.0, 1.0, 0.0);
  std::vector<Quat> world_to_camera;  // optional
  std::vector<Quat> relative;         // optional, entry 0 is the identity

  int frame_count() const {
    return static_cast<int>(world_to_camera.empty() ? relative.size() : world_to_camera.size());
  }
  std::vector<Rotation> absolute_rotations() const;
  // Relative rotations R_delta[t] mapping camera-(t-1) coordinates into
  // camera-t coordinates; derived from the absolute track when absent.
  std::vector<Rotation> relative_rotations() const;
};

// Per-frame estimation tracks consumed by the trajectory recovery: the
// gravity-view orientation, the camera-frame orientation and the body-frame
// root displacement, plus optional pose/stationary tracks carried through to
// the recovered motion.
struct GvTrackFile {
  int version = 1;
  double fps = 30.0;
  std::vector<Quat> gamma_gv;
  std::vector<Quat> gamma_c;
  std::vector<Vec3> v_root;
  std::vector<std::vector<Vec3>> joint_rotations;  // optional
  Eigen::MatrixXd stationary_probs;                // optional

  int frame_count() const { return static_cast<int>(gamma_gv.size()); }
  std::vector<Rotation> gamma_gv_rotations() const;
  std::vector<Rotation> gamma_c_rotations() const;
};

MotionFile load_motion(const std::string& path);
void save_motion(const std::string& path, const MotionFile& file);

CameraFile load_camera(const std::string& path);
void save_camera(const std::string& path, const CameraFile& file);

GvTrackFile load_gv_track(const std::string& path);
void save_gv_track(const std::string& path, const GvTrackFile& file);

Quat quat_of(const Rotation& r);

}  // namespace gvm::io
