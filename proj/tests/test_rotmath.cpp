#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gvm/random.hpp"
#include "gvm/rotmath.hpp"

using namespace gvm;

namespace {

Rotation random_rotation(Rng& rng, double max_angle = 0.98 * std::numbers::pi) {
  return Rotation::from_axis_angle(rng.unit_vector() * rng.uniform(0.0, max_angle));
}

double max_abs_diff(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("axis-angle basics") {
  CHECK(max_abs_diff(Rotation::from_axis_angle(Vec3::Zero()).matrix(), Mat3::Identity()) == 0.0);

  // R_y(pi/2) maps (0,0,1) to (1,0,0).
  const Rotation r = Rotation::from_axis_angle(Vec3(0.0, std::numbers::pi / 2.0, 0.0));
  const Vec3 mapped = r * Vec3(0.0, 0.0, 1.0);
  CHECK(mapped.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mapped.y()) < 1e-12);
  CHECK(std::abs(mapped.z()) < 1e-12);

  Mat3 expected;
  const double c = std::cos(std::numbers::pi / 2.0);
  const double s = std::sin(std::numbers::pi / 2.0);
  expected << c, 0, s, 0, 1, 0, -s, 0, c;
  CHECK(max_abs_diff(r.matrix(), expected) < 1e-15);
}

TEST_CASE("axis-angle round trip for 1000 random vectors") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.unit_vector() * rng.uniform(0.0, std::numbers::pi - 1e-9);
    const Vec3 back = Rotation::from_axis_angle(v).to_axis_angle();
    CHECK((back - v).norm() < 1e-9);
  }
}

TEST_CASE("rotation invariants on random products") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation(rng) * random_rotation(rng) * random_rotation(rng);
    CHECK(max_abs_diff(r.matrix().transpose() * r.matrix(), Mat3::Identity()) < 1e-9);
    CHECK(r.matrix().determinant() > 0.0);
  }
}

TEST_CASE("compose: identity, inverse, angle addition") {
  Rng rng(13);
  const Rotation r = random_rotation(rng);
  CHECK(max_abs_diff((Rotation::identity() * r).matrix(), r.matrix()) == 0.0);
  CHECK(max_abs_diff((r * r.inverse()).matrix(), Mat3::Identity()) < 1e-12);

  const double d30 = std::numbers::pi / 6.0;
  const double d60 = std::numbers::pi / 3.0;
  const Rotation sum = rot_about_y(d30) * rot_about_y(d60);
  CHECK(max_abs_diff(sum.matrix(), rot_about_y(d30 + d60).matrix()) < 1e-12);
}

TEST_CASE("composition associativity on random triples") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const Rotation a = random_rotation(rng);
    const Rotation b = random_rotation(rng);
    const Rotation c = random_rotation(rng);
    CHECK(max_abs_diff(((a * b) * c).matrix(), (a * (b * c)).matrix()) < 1e-9);
  }
}

TEST_CASE("inverse properties") {
  Rng rng(15);
  CHECK(max_abs_diff(Rotation::identity().inverse().matrix(), Mat3::Identity()) == 0.0);
  const double theta = 0.7;
  CHECK(max_abs_diff(rot_about_y(theta).inverse().matrix(), rot_about_y(-theta).matrix()) <
        1e-12);
  for (int i = 0; i < 100; ++i) {
    const Rotation r = random_rotation(rng);
    CHECK(max_abs_diff((r * r.inverse()).matrix(), Mat3::Identity()) < 1e-12);
  }
}

TEST_CASE("geodesic angle") {
  Rng rng(16);
  const Rotation r = random_rotation(rng);
  // The arccos form has a ~1e-8 conditioning floor near zero angle.
  CHECK(geodesic_angle(r, r) < 1e-6);
  for (int i = 0; i < 50; ++i) {
    const double theta = rng.uniform(-std::numbers::pi + 1e-6, std::numbers::pi - 1e-6);
    CHECK(std::abs(geodesic_angle(Rotation::identity(), rot_about_y(theta)) - std::abs(theta)) <
          1e-7);
  }
  for (int i = 0; i < 50; ++i) {
    const Rotation a = random_rotation(rng);
    const Rotation b = random_rotation(rng);
    CHECK(geodesic_angle(a, b) == doctest::Approx(geodesic_angle(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("rot_about_y fixes the y axis exactly") {
  Rng rng(17);
  CHECK(max_abs_diff(rot_about_y(0.0).matrix(), Mat3::Identity()) == 0.0);
  for (int i = 0; i < 100; ++i) {
    const double theta = rng.uniform(-10.0, 10.0);
    const Vec3 y = rot_about_y(theta) * Vec3(0.0, 1.0, 0.0);
    CHECK(y.x() == 0.0);
    CHECK(y.y() == 1.0);
    CHECK(y.z() == 0.0);
  }
}

TEST_CASE("yaw_between_horizontal convention") {
  // Same direction: zero.
  CHECK(yaw_between_horizontal(Vec3(0, 0, 1), Vec3(0, 0, 1)) == 0.0);
  // +z to +x is +pi/2 (positive yaw turns +z toward +x).
  CHECK(yaw_between_horizontal(Vec3(0, 0, 1), Vec3(1, 0, 0)) ==
        doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
  // The y component is discarded.
  CHECK(yaw_between_horizontal(Vec3(0.0, 0.9, 0.1), Vec3(0.0, -0.4, 0.2)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Degenerate: nearly vertical vectors.
  CHECK_THROWS_AS(yaw_between_horizontal(Vec3(0, 1, 0), Vec3(0, 0, 1)),
                  DegenerateHorizontalProjection);
  CHECK_THROWS_AS(yaw_between_horizontal(Vec3(0, 0, 1), Vec3(1e-9, 1, 1e-9)),
                  DegenerateHorizontalProjection);
}

TEST_CASE("yaw_between_horizontal round trip against rot_about_y") {
  Rng rng(18);
  for (int i = 0; i < 500; ++i) {
    Vec3 u = rng.unit_vector();
    if (std::hypot(u.x(), u.z()) < 1e-3) {
      continue;
    }
    const double theta = rng.uniform(-std::numbers::pi + 1e-6, std::numbers::pi - 1e-6);
    const Vec3 w = rot_about_y(theta) * u;
    CHECK(yaw_between_horizontal(u, w) == doctest::Approx(theta).epsilon(1e-9));
  }
}

TEST_CASE("quaternion round trip") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation(rng);
    const Rotation back = Rotation::from_quaternion(r.to_quaternion());
    CHECK(max_abs_diff(r.matrix(), back.matrix()) < 1e-12);
  }
}

TEST_CASE("from_matrix validates orthonormality") {
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(Rotation::from_matrix(bad), NormViolation);

  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(Rotation::from_matrix(reflect), NormViolation);

  const Rotation fixed = Rotation::from_matrix_orthonormalized(bad);
  CHECK(max_abs_diff(fixed.matrix().transpose() * fixed.matrix(), Mat3::Identity()) < 1e-12);
}
