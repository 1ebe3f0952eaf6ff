#include "gvm/trajectory.hpp"

#include <string>

namespace gvm {

namespace {

constexpr std::size_t kReorthonormalizeEvery = 256;

void require_equal(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw LengthMismatch(std::string(what) + ": lengths differ (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

std::vector<Rotation> recover_world_orientations(std::span<const Rotation> gamma_gv,
                                                 std::span<const Rotation> r_delta_gv) {
  require_equal(gamma_gv.size(), r_delta_gv.size(), "recover_world_orientations");
  std::vector<Rotation> out(gamma_gv.size());
  if (gamma_gv.empty()) {
    return out;
  }
  out[0] = gamma_gv[0];
  Rotation prefix;  // identity
  for (std::size_t t = 1; t < gamma_gv.size(); ++t) {
    prefix = prefix * r_delta_gv[t];
    if (t % kReorthonormalizeEvery == 0) {
      prefix = Rotation::from_matrix_orthonormalized(prefix.matrix());
    }
    out[t] = prefix * gamma_gv[t];
  }
  return out;
}

std::vector<Vec3> recover_world_translations(std::span<const Rotation> gamma_w,
                                             std::span<const Vec3> v_root) {
  require_equal(gamma_w.size(), v_root.size(), "recover_world_translations");
  std::vector<Vec3> out(gamma_w.size());
  if (gamma_w.empty()) {
    return out;
  }
  out[0] = Vec3::Zero();
  for (std::size_t t = 1; t < gamma_w.size(); ++t) {
    out[t] = out[t - 1] + gamma_w[t - 1] * v_root[t - 1];
  }
  return out;
}

WorldTrajectory recover_global_trajectory(const TrajectoryInputs& inputs) {
  require_equal(inputs.gamma_gv.size(), inputs.gamma_c.size(), "recover_global_trajectory");
  require_equal(inputs.gamma_gv.size(), inputs.r_delta.size(), "recover_global_trajectory");
  require_equal(inputs.gamma_gv.size(), inputs.v_root.size(), "recover_global_trajectory");

  const std::vector<Rotation> r_delta_gv =
      gv_relative_track(inputs.gamma_c, inputs.gamma_gv, inputs.r_delta);
  WorldTrajectory out;
  out.orientation = recover_world_orientations(inputs.gamma_gv, r_delta_gv);
  out.translation = recover_world_translations(out.orientation, inputs.v_root);
  return out;
}

std::vector<Rotation> naive_camera_chain_orientations(std::span<const Rotation> gamma_c,
                                                      std::span<const Rotation> r_delta) {
  require_equal(gamma_c.size(), r_delta.size(), "naive_camera_chain_orientations");
  std::vector<Rotation> out(gamma_c.size());
  if (gamma_c.empty()) {
    return out;
  }
  out[0] = gamma_c[0];
  Rotation chain;  // camera-0 -> camera-t
  for (std::size_t t = 1; t < gamma_c.size(); ++t) {
    chain = r_delta[t] * chain;
    if (t % kReorthonormalizeEvery == 0) {
      chain = Rotation::from_matrix_orthonormalized(chain.matrix());
    }
    out[t] = chain.inverse() * gamma_c[t];
  }
  return out;
}

}  // namespace gvm
