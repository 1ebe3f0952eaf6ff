#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gvm/ik.hpp"
#include "gvm/postprocess.hpp"
#include "gvm/random.hpp"
#include "gvm/skeleton.hpp"

using namespace gvm;

namespace {

Skeleton two_link_arm() {
  // root -> shoulder (short clavicle) -> elbow -> wrist; link lengths 1 and 1.
  std::vector<Joint> joints = {
      {"root", -1, {0, 0, 0}},
      {"shoulder", 0, {0.0, 0.0, 0.2}},
      {"elbow", 1, {1.0, 0.0, 0.0}},
      {"wrist", 2, {1.0, 0.0, 0.0}},
  };
  return Skeleton(std::move(joints), {});
}

Rotation random_rotation(Rng& rng) {
  return Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, 2.5));
}

}  // namespace

TEST_CASE("skeleton construction rules") {
  CHECK_THROWS_AS(Skeleton({{"a", 0, {1, 0, 0}}}, {}), ShapeMismatch);  // root must have parent -1
  CHECK_THROWS_AS(Skeleton({{"root", -1, {0, 0, 0}}, {"b", 1, {1, 0, 0}}}, {}), ShapeMismatch);
  CHECK_THROWS_AS(Skeleton({{"root", -1, {0, 0, 0}}, {"b", 0, {0, 0, 0}}}, {}), ShapeMismatch);

  const Skeleton smpl = Skeleton::smpl24();
  CHECK(smpl.joint_count() == 24);
  CHECK(smpl.index_of("left_ankle") == 7);
  CHECK_THROWS_AS(smpl.index_of("nope"), UnknownJoint);
  CHECK(smpl.stationary_candidates().size() == 6);
  const auto chain = smpl.chain_to_root(10);  // left_foot
  CHECK(chain == std::vector<int>{10, 7, 4, 1});
}

TEST_CASE("forward kinematics: rest pose stacks offsets") {
  const Skeleton skel = Skeleton::smpl24();
  Rng rng(51);
  const Rotation root = random_rotation(rng);
  const Vec3 pos(0.3, 0.9, -0.2);
  std::vector<Vec3> theta(static_cast<std::size_t>(skel.joint_count() - 1), Vec3::Zero());
  const auto fk = forward_kinematics(skel, root, pos, theta);
  for (int j = 0; j < skel.joint_count(); ++j) {
    Vec3 rest = Vec3::Zero();
    for (int a = j; a != 0; a = skel.joint(a).parent) {
      rest += skel.joint(a).offset;
    }
    CHECK((fk[static_cast<std::size_t>(j)] - (pos + root * rest)).norm() < 1e-12);
  }
}

TEST_CASE("forward kinematics: bent two-joint chain") {
  std::vector<Joint> joints = {
      {"root", -1, {0, 0, 0}},
      {"a", 0, {1.0, 0.0, 0.0}},
      {"b", 1, {1.0, 0.0, 0.0}},
  };
  const Skeleton skel(std::move(joints), {});
  std::vector<Vec3> theta = {Vec3(0.0, 0.0, std::numbers::pi / 2.0), Vec3::Zero()};
  const auto fk = forward_kinematics(skel, Rotation::identity(), Vec3::Zero(), theta);
  CHECK((fk[1] - Vec3(1.0, 0.0, 0.0)).norm() < 1e-12);
  CHECK((fk[2] - Vec3(1.0, 1.0, 0.0)).norm() < 1e-12);

  CHECK_THROWS_AS(
      forward_kinematics(skel, Rotation::identity(), Vec3::Zero(), std::vector<Vec3>(3)),
      ShapeMismatch);
}

TEST_CASE("forward kinematics is equivariant under rigid motions") {
  const Skeleton skel = Skeleton::smpl24();
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> theta(static_cast<std::size_t>(skel.joint_count() - 1));
    for (auto& v : theta) {
      v = rng.unit_vector() * rng.uniform(0.0, 1.0);
    }
    const Rotation root = random_rotation(rng);
    const Vec3 pos(rng.normal(), rng.normal(), rng.normal());
    const Rotation rigid = random_rotation(rng);
    const Vec3 shift(rng.normal(), rng.normal(), rng.normal());

    const auto base = forward_kinematics(skel, root, pos, theta);
    const auto moved = forward_kinematics(skel, rigid * root, rigid * pos + shift, theta);
    for (std::size_t j = 0; j < base.size(); ++j) {
      CHECK((moved[j] - (rigid * base[j] + shift)).norm() < 1e-9);
    }
  }
}

TEST_CASE("ccd: target at the current position changes nothing") {
  const Skeleton arm = two_link_arm();
  std::vector<Vec3> theta(3, Vec3::Zero());
  const auto fk = forward_kinematics(arm, Rotation::identity(), Vec3::Zero(), theta);
  const IkResult res = ccd_ik_solve(arm, Rotation::identity(), Vec3::Zero(), theta,
                                    std::vector<IkTarget>{{3, fk[3]}});
  CHECK(res.converged);
  CHECK(res.error_history.front() < 1e-12);
  for (const auto& v : res.theta) {
    CHECK(v.norm() < 1e-12);
  }
}

TEST_CASE("ccd: two-link arm reaches an in-range target") {
  const Skeleton arm = two_link_arm();
  std::vector<Vec3> theta(3, Vec3::Zero());
  const Vec3 shoulder(0.0, 0.0, 0.2);
  const Vec3 target = shoulder + Vec3(1.0, 1.0, 0.0);
  IkParams params;
  params.max_iter = 100;
  params.tol = 1e-4;
  const IkResult res = ccd_ik_solve(arm, Rotation::identity(), Vec3::Zero(), theta,
                                    std::vector<IkTarget>{{3, target}}, params);
  const auto fk = forward_kinematics(arm, Rotation::identity(), Vec3::Zero(), res.theta);
  CHECK((fk[3] - target).norm() < 1e-3);

  // Interior elbow angle for links 1,1 at distance sqrt(2) is 90 degrees.
  const Vec3 upper = fk[2] - fk[1];
  const Vec3 fore = fk[3] - fk[2];
  const double interior = std::acos(std::clamp(-upper.dot(fore), -1.0, 1.0));
  CHECK(interior == doctest::Approx(std::numbers::pi / 2.0).epsilon(5e-3));

  for (std::size_t i = 1; i < res.error_history.size(); ++i) {
    CHECK(res.error_history[i] <= res.error_history[i - 1] + 1e-12);
  }
}

TEST_CASE("ccd: unreachable target leaves the residual at distance minus reach") {
  const Skeleton arm = two_link_arm();
  std::vector<Vec3> theta(3, Vec3::Zero());
  const Vec3 shoulder(0.0, 0.0, 0.2);
  const Vec3 dir = Vec3(0.6, 0.8, 0.0).normalized();
  const Vec3 target = shoulder + 3.0 * dir;
  IkParams params;
  params.max_iter = 200;
  const IkResult res = ccd_ik_solve(arm, Rotation::identity(), Vec3::Zero(), theta,
                                    std::vector<IkTarget>{{3, target}}, params);
  const auto fk = forward_kinematics(arm, Rotation::identity(), Vec3::Zero(), res.theta);
  CHECK((fk[3] - target).norm() == doctest::Approx(1.0).epsilon(1e-3));
  // Chain aligned toward the target.
  CHECK(((fk[3] - shoulder).normalized() - dir).norm() < 1e-2);

  CHECK_THROWS_AS(ccd_ik_solve(arm, Rotation::identity(), Vec3::Zero(), theta,
                               std::vector<IkTarget>{{99, target}}),
                  UnknownJoint);
}

TEST_CASE("translation refinement: zero displacement is a no-op") {
  const std::size_t frames = 6;
  std::vector<Vec3> tau(frames, Vec3(0.1, 0.2, 0.3));
  std::vector<std::vector<Vec3>> joints(frames, {Vec3(1, 0, 0), Vec3(0, 1, 0)});
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(frames, 2);
  const auto out = refine_global_translation(tau, joints, logits);
  for (std::size_t i = 0; i < frames; ++i) {
    CHECK((out[i] - tau[i]).norm() == 0.0);
  }
}

TEST_CASE("translation refinement pins the confident joint") {
  const std::size_t frames = 10;
  std::vector<Vec3> tau(frames, Vec3::Zero());
  std::vector<std::vector<Vec3>> joints(frames);
  Eigen::MatrixXd logits(frames, 2);
  for (std::size_t i = 0; i < frames; ++i) {
    joints[i] = {Vec3(0.01 * static_cast<double>(i), 0.0, 0.0),
                 Vec3(0.0, -0.05 * static_cast<double>(i), 0.0)};
    logits(static_cast<Eigen::Index>(i), 0) = 100.0;
    logits(static_cast<Eigen::Index>(i), 1) = -100.0;
  }
  const auto out = refine_global_translation(tau, joints, logits);
  // The pinned joint's world position (joint + translation correction) stays
  // at its first-frame location.
  for (std::size_t i = 0; i < frames; ++i) {
    const Vec3 world = joints[i][0] + (out[i] - tau[i]);
    CHECK((world - joints[0][0]).norm() < 1e-6);
  }
}

TEST_CASE("translation refinement averages equal-logit joints") {
  const std::size_t frames = 4;
  std::vector<Vec3> tau(frames, Vec3::Zero());
  const Vec3 d1(0.02, 0.0, 0.0);
  const Vec3 d2(0.0, 0.0, -0.04);
  std::vector<std::vector<Vec3>> joints(frames);
  Eigen::MatrixXd logits = Eigen::MatrixXd::Constant(frames, 2, 3.0);
  for (std::size_t i = 0; i < frames; ++i) {
    joints[i] = {static_cast<double>(i) * d1, static_cast<double>(i) * d2};
  }
  const auto out = refine_global_translation(tau, joints, logits);
  for (std::size_t i = 1; i < frames; ++i) {
    const Vec3 expected = -static_cast<double>(i) * 0.5 * (d1 + d2);
    CHECK((out[i] - expected).norm() < 1e-12);
  }

  CHECK_THROWS_AS(refine_global_translation(tau, joints, Eigen::MatrixXd::Zero(frames, 3)),
                  ShapeMismatch);
}

TEST_CASE("stationary position adjustment recurrence") {
  std::vector<Vec3> pos = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};

  std::vector<double> zero(3, 0.0);
  const auto pass = adjust_stationary_positions(pos, zero);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    CHECK((pass[i] - pos[i]).norm() == 0.0);
  }

  std::vector<double> one(3, 1.0);
  const auto frozen = adjust_stationary_positions(pos, one);
  for (const auto& p : frozen) {
    CHECK((p - pos[0]).norm() == 0.0);
  }

  std::vector<double> half(3, 0.5);
  const auto blended = adjust_stationary_positions(pos, half);
  CHECK(blended[0].x() == doctest::Approx(0.0));
  CHECK(blended[1].x() == doctest::Approx(0.5));
  CHECK(blended[2].x() == doctest::Approx(1.25));

  std::vector<double> bad = {0.0, 1.5, 0.0};
  CHECK_THROWS_AS(adjust_stationary_positions(pos, bad), ProbabilityOutOfRange);
  CHECK_THROWS_AS(adjust_stationary_positions(pos, std::vector<double>(2, 0.0)), ShapeMismatch);
}

TEST_CASE("stationary position adjustment stays in the blend hull") {
  Rng rng(53);
  const std::size_t frames = 50;
  std::vector<Vec3> pos(frames);
  std::vector<double> probs(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    pos[i] = Vec3(rng.normal(), rng.normal(), rng.normal());
    probs[i] = rng.uniform();
  }
  const auto out = adjust_stationary_positions(pos, probs);
  for (std::size_t i = 1; i < frames; ++i) {
    for (int k = 0; k < 3; ++k) {
      const double lo = std::min(pos[i](k), out[i - 1](k)) - 1e-12;
      const double hi = std::max(pos[i](k), out[i - 1](k)) + 1e-12;
      CHECK(out[i](k) >= lo);
      CHECK(out[i](k) <= hi);
    }
  }
}

TEST_CASE("stationary track keeps probabilities and logits consistent") {
  Rng rng(54);
  Eigen::MatrixXd logits(5, 3);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    logits(i) = rng.uniform(-8.0, 8.0);
  }
  const StationaryTrack from_s = StationaryTrack::from_logits(logits);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    CHECK(std::abs(from_s.probs(i) - 1.0 / (1.0 + std::exp(-from_s.logits(i)))) < 1e-12);
  }
  const StationaryTrack back = StationaryTrack::from_probs(from_s.probs);
  CHECK((back.logits - logits).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 1.25);
  CHECK_THROWS_AS(StationaryTrack::from_probs(bad), ProbabilityOutOfRange);
}

TEST_CASE("postprocess: motion without stationary frames passes through") {
  const Skeleton skel = Skeleton::smpl24();
  const int frames = 8;
  MotionSequence motion;
  motion.fps = 30.0;
  for (int t = 0; t < frames; ++t) {
    motion.root_orientation.push_back(rot_about_y(0.05 * t));
    motion.root_translation.push_back(Vec3(0.02 * t, 0.9, 0.0));
    motion.joint_rotations.emplace_back(static_cast<std::size_t>(skel.joint_count() - 1),
                                        Vec3::Zero());
  }
  motion.stationary_probs = Eigen::MatrixXd::Constant(frames, 6, 0.001);

  const MotionSequence out = postprocess_motion(motion, skel);
  for (int t = 0; t < frames; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    CHECK((out.root_translation[ti] - motion.root_translation[ti]).norm() < 1e-6);
    for (std::size_t j = 0; j < out.joint_rotations[ti].size(); ++j) {
      CHECK((out.joint_rotations[ti][j] - motion.joint_rotations[ti][j]).norm() < 1e-6);
    }
  }

  MotionSequence missing = motion;
  missing.stationary_probs.resize(0, 0);
  CHECK_THROWS_AS(postprocess_motion(missing, skel), ShapeMismatch);
}
