#pragma once

namespace gvm {

// Pinhole intrinsics: focal length and principal point, pixels.
struct CameraIntrinsics {
  double f = 1000.0;
  double px = 640.0;
  double py = 360.0;
  int width = 1280;
  int height = 720;
};

}  // namespace gvm
