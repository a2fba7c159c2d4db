#pragma once

#include <Eigen/Dense>

namespace tcbirrt {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Cross-product matrix: skew(v) * x == v.cross(x).
Mat3 skew(const Vec3& v);

/// Rigid transform acting as x -> R * x + p.
struct Transform {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  static Transform Identity() { return {}; }
  static Transform FromTranslation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static Transform FromRotation(const Mat3& rot) { return {rot, Vec3::Zero()}; }

  Transform operator*(const Transform& other) const;
  Vec3 operator*(const Vec3& x) const { return R * x + p; }
  Transform inverse() const;
  Eigen::Matrix4d matrix() const;
  bool isApprox(const Transform& other, double tol = 1e-9) const;
};

/// Object pose: position plus fixed-axis roll/pitch/yaw Euler angles,
/// realized as R = Rz(u[2]) * Ry(u[1]) * Rx(u[0]).
struct Pose6 {
  Vec3 p = Vec3::Zero();
  Vec3 u = Vec3::Zero();

  Vec6 vec() const;
  static Pose6 FromVec(const Vec6& v);
  bool isApprox(const Pose6& other, double tol = 1e-9) const;
};

/// Deviation vector of a transform: the translation stacked with the
/// roll/pitch/yaw angles extracted from the rotation block.
Vec6 transform_to_deviation(const Transform& T);

Pose6 transform_to_pose(const Transform& T);
Transform pose_to_transform(const Pose6& xi);

/// Exponential coordinates phi = axis * angle of a rotation, ||phi|| <= pi.
Vec3 rotation_to_expcoords(const Mat3& R);

/// Rodrigues' formula.
Mat3 expcoords_to_rotation(const Vec3& phi);

/// Relative rotation angle between two rotations, in [0, pi].
double rotation_angle_between(const Mat3& Ra, const Mat3& Rb);

bool is_rotation(const Mat3& R, double tol = 1e-9);

}  // namespace tcbirrt
