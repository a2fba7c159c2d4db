#include "tcbirrt/se3.hpp"

#include <algorithm>
#include <cmath>

namespace tcbirrt {

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return m;
}

Transform Transform::operator*(const Transform& other) const {
  return {R * other.R, R * other.p + p};
}

Transform Transform::inverse() const {
  Mat3 rt = R.transpose();
  return {rt, -(rt * p)};
}

Eigen::Matrix4d Transform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = p;
  return m;
}

bool Transform::isApprox(const Transform& other, double tol) const {
  return (R - other.R).norm() <= tol && (p - other.p).norm() <= tol;
}

Vec6 Pose6::vec() const {
  Vec6 v;
  v << p, u;
  return v;
}

Pose6 Pose6::FromVec(const Vec6& v) {
  return {v.head<3>(), v.tail<3>()};
}

bool Pose6::isApprox(const Pose6& other, double tol) const {
  return (vec() - other.vec()).lpNorm<Eigen::Infinity>() <= tol;
}

Vec6 transform_to_deviation(const Transform& T) {
  const Mat3& R = T.R;
  Vec6 out;
  out.head<3>() = T.p;
  out[3] = std::atan2(R(2, 1), R(2, 2));
  out[4] = -std::atan2(R(2, 0), std::sqrt(R(2, 1) * R(2, 1) + R(2, 2) * R(2, 2)));
  out[5] = std::atan2(R(1, 0), R(0, 0));
  return out;
}

Pose6 transform_to_pose(const Transform& T) {
  return Pose6::FromVec(transform_to_deviation(T));
}

Transform pose_to_transform(const Pose6& xi) {
  return {rot_z(xi.u[2]) * rot_y(xi.u[1]) * rot_x(xi.u[0]), xi.p};
}

namespace {
constexpr double kZeroAngleTol = 1e-9;
constexpr double kPiAngleTol = 1e-6;
}  // namespace

Vec3 rotation_to_expcoords(const Mat3& R) {
  const double cos_theta = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  double theta = std::acos(cos_theta);
  const Vec3 w_sin(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (theta < 0.1) {
    // The trace quantizes near +1 and flattens small angles; sin(theta) from
    // the antisymmetric part keeps full precision there.
    theta = std::asin(std::clamp(0.5 * w_sin.norm(), 0.0, 1.0));
  }
  if (theta < kZeroAngleTol) {
    return Vec3::Zero();
  }
  if (M_PI - theta < kPiAngleTol) {
    // Near pi the antisymmetric part vanishes; recover the axis from the
    // symmetric part, (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) w w^T,
    // using the column with the largest diagonal entry. Reduces to the
    // (1 + r11) column form at theta == pi.
    const Mat3 B = 0.5 * (R + R.transpose()) - cos_theta * Mat3::Identity();
    int k = 0;
    B.diagonal().maxCoeff(&k);
    const double scale = 1.0 - cos_theta;
    Vec3 axis = B.col(k) / std::sqrt(std::max(scale * B(k, k), 1e-300));
    axis.normalize();
    // The symmetric part is blind to the sign; take it from sin(theta) * w.
    if (w_sin.dot(axis) < 0.0) {
      axis = -axis;
    }
    // The trace loses the angle in the last ulps of cos near -1; the
    // antisymmetric part still carries sin(pi - theta) at full precision.
    const double refined = M_PI - std::asin(std::clamp(0.5 * w_sin.norm(), 0.0, 1.0));
    return axis * refined;
  }
  // Normalizing sidesteps the ill-conditioned division by sin(theta) that
  // amplifies the acos rounding error as theta approaches pi.
  return theta * w_sin.normalized();
}

Mat3 expcoords_to_rotation(const Vec3& phi) {
  const double theta = phi.norm();
  if (theta < 1e-12) {
    return Mat3::Identity() + skew(phi);
  }
  const Mat3 K = skew(phi / theta);
  const double half_sin = std::sin(0.5 * theta);
  return Mat3::Identity() + std::sin(theta) * K + (2.0 * half_sin * half_sin) * K * K;
}

double rotation_angle_between(const Mat3& Ra, const Mat3& Rb) {
  return rotation_to_expcoords(Ra.transpose() * Rb).norm();
}

bool is_rotation(const Mat3& R, double tol) {
  return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

}  // namespace tcbirrt
