#include "test_main.hpp"

#include "tcbirrt/se3.hpp"

using namespace tcbirrt;

namespace {

// Independent realization of the deviation extraction, written directly
// against a plain 4x4 matrix.
Vec6 deviation_oracle(const Eigen::Matrix4d& T) {
  Vec6 out;
  out[0] = T(0, 3);
  out[1] = T(1, 3);
  out[2] = T(2, 3);
  out[3] = std::atan2(T(2, 1), T(2, 2));
  out[4] = -std::atan2(T(2, 0), std::sqrt(T(2, 1) * T(2, 1) + T(2, 2) * T(2, 2)));
  out[5] = std::atan2(T(1, 0), T(0, 0));
  return out;
}

// Componentwise Rodrigues formula, independent of the skew-matrix route.
Mat3 rodrigues_oracle(const Vec3& phi) {
  const double theta = phi.norm();
  if (theta == 0.0) {
    return Mat3::Identity();
  }
  const Vec3 w = phi / theta;
  const double c = std::cos(theta), s = std::sin(theta), v = 1.0 - c;
  Mat3 R;
  R << c + w.x() * w.x() * v, w.x() * w.y() * v - w.z() * s, w.x() * w.z() * v + w.y() * s,
      w.y() * w.x() * v + w.z() * s, c + w.y() * w.y() * v, w.y() * w.z() * v - w.x() * s,
      w.z() * w.x() * v - w.y() * s, w.z() * w.y() * v + w.x() * s, c + w.z() * w.z() * v;
  return R;
}

}  // namespace

TEST_CASE("deviation of the identity transform is exactly zero") {
  const Vec6 d = transform_to_deviation(Transform::Identity());
  for (int i = 0; i < 6; ++i) {
    CHECK(d[i] == 0.0);
  }
}

TEST_CASE("deviation of a single-axis rotation with translation") {
  Transform T;
  T.p = Vec3(1, 2, 3);
  T.R = rot_z(M_PI / 2);
  const Vec6 d = transform_to_deviation(T);
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == doctest::Approx(3.0));
  CHECK(d[3] == doctest::Approx(0.0));
  CHECK(d[4] == doctest::Approx(0.0));
  CHECK(d[5] == doctest::Approx(M_PI / 2));
}

TEST_CASE("deviation matches the 4x4 oracle on seeded random transforms") {
  Rng rng(42);
  for (int k = 0; k < 100; ++k) {
    Transform T;
    T.R = test_util::random_rotation(rng);
    T.p = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const Vec6 got = transform_to_deviation(T);
    const Vec6 want = deviation_oracle(T.matrix());
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("pose realization basics") {
  CHECK(pose_to_transform(Pose6{}).isApprox(Transform::Identity(), 1e-15));
  const Transform T = pose_to_transform({Vec3::Zero(), Vec3(0, 0, M_PI / 2)});
  CHECK((T.R - rot_z(M_PI / 2)).norm() <= 1e-15);
}

TEST_CASE("pose round trip away from gimbal lock") {
  Rng rng(7);
  for (int k = 0; k < 1000; ++k) {
    Pose6 xi;
    xi.p = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    xi.u = Vec3(rng.uniform(-M_PI, M_PI), rng.uniform(-1.5, 1.5), rng.uniform(-M_PI, M_PI));
    const Pose6 back = transform_to_pose(pose_to_transform(xi));
    CHECK((back.vec() - xi.vec()).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("exponential coordinates of canonical rotations") {
  CHECK(rotation_to_expcoords(Mat3::Identity()).norm() == 0.0);

  const Vec3 half_turn_x = rotation_to_expcoords(rot_x(M_PI));
  CHECK((half_turn_x - Vec3(M_PI, 0, 0)).norm() <= 1e-9);

  const Vec3 quarter_z = rotation_to_expcoords(rot_z(M_PI / 2));
  CHECK((quarter_z - Vec3(0, 0, M_PI / 2)).norm() <= 1e-9);
}

TEST_CASE("rotation realization of canonical coordinates") {
  CHECK((expcoords_to_rotation(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  CHECK((expcoords_to_rotation(Vec3(0, 0, M_PI / 2)) - rot_z(M_PI / 2)).norm() <= 1e-12);
}

TEST_CASE("exp matches the componentwise Rodrigues oracle") {
  Rng rng(3);
  for (int k = 0; k < 10000; ++k) {
    const Vec3 phi = test_util::random_unit_vector(rng) * rng.uniform(0.0, M_PI - 1e-3);
    CHECK((expcoords_to_rotation(phi) - rodrigues_oracle(phi)).norm() <= 1e-12);
  }
}

TEST_CASE("exp/log round trip over random rotations") {
  Rng rng(5);
  for (int k = 0; k < 10000; ++k) {
    const Mat3 R = test_util::random_rotation(rng, M_PI - 1e-6);
    const Mat3 back = expcoords_to_rotation(rotation_to_expcoords(R));
    CHECK((back - R).norm() <= 1e-9);
    CHECK(is_rotation(back, 1e-9));
  }
}

TEST_CASE("exp/log round trip near a half turn") {
  Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    const double theta = rng.uniform(M_PI - 1e-3, M_PI);
    const Mat3 R = expcoords_to_rotation(test_util::random_unit_vector(rng) * theta);
    const Vec3 phi = rotation_to_expcoords(R);
    CHECK(phi.norm() <= M_PI + 1e-12);
    CHECK((expcoords_to_rotation(phi) - R).norm() <= 1e-9);
  }
}

TEST_CASE("log at exactly pi keeps the canonical branch") {
  const Mat3 R = rot_x(M_PI);
  const Vec3 phi = rotation_to_expcoords(R);
  CHECK(phi.norm() <= M_PI + 1e-12);
  CHECK((expcoords_to_rotation(phi) - R).norm() <= 1e-9);
}

TEST_CASE("compose and inverse") {
  const Transform T = {rot_y(0.3), Vec3(1, 0, 0)};
  CHECK((Transform::Identity() * T).isApprox(T, 1e-15));
  CHECK(Transform::FromTranslation({1, 0, 0}).inverse().isApprox(
      Transform::FromTranslation({-1, 0, 0}), 1e-15));

  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    Transform A{test_util::random_rotation(rng),
                Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))};
    Transform B{test_util::random_rotation(rng),
                Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))};
    const Eigen::Matrix4d want = A.matrix() * B.matrix();
    CHECK(((A * B).matrix() - want).norm() <= 1e-12);
    CHECK((A * A.inverse()).isApprox(Transform::Identity(), 1e-12));
    CHECK(is_rotation((A * B).R, 1e-9));
  }
}

TEST_CASE("relative rotation angle") {
  CHECK(rotation_angle_between(rot_z(0.2), rot_z(1.0)) == doctest::Approx(0.8));
  CHECK(rotation_angle_between(Mat3::Identity(), rot_x(M_PI)) == doctest::Approx(M_PI));
}
