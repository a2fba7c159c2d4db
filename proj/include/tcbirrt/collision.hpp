#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "tcbirrt/kinematics.hpp"

namespace tcbirrt {

struct BoxShape {
  Vec3 half_extents = Vec3::Ones();
  Transform pose;
};

struct SphereShape {
  double radius = 1.0;
  Vec3 center = Vec3::Zero();
};

struct CapsuleShape {
  double radius = 1.0;
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
};

using Shape = std::variant<BoxShape, CapsuleShape, SphereShape>;

Shape transformed(const Shape& s, const Transform& T);

/// True iff the minimum distance between the shapes is <= 0; touching counts.
bool shapes_intersect(const Shape& a, const Shape& b);

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
double point_segment_distance(const Vec3& x, const Vec3& p0, const Vec3& p1);
double point_box_distance(const Vec3& x, const BoxShape& box);
double segment_box_distance(const Vec3& p0, const Vec3& p1, const BoxShape& box);

/// Per-link capsule radii and the held-object box, in the object frame.
struct RobotGeometry {
  std::array<std::vector<double>, 2> link_radii;
  Vec3 object_half_extents = Vec3(1.0, 0.4, 0.4);
};

struct LinkRef {
  int arm = 0;
  int link = 0;
};

struct WorldModel {
  std::vector<Shape> obstacles;
  RobotGeometry robot;
  DualArmSystem system;
  std::vector<std::pair<LinkRef, LinkRef>> self_collision_pairs;
};

/// Every inter-arm link pair; intra-arm pairs are opt-in via the scene file.
std::vector<std::pair<LinkRef, LinkRef>> default_self_collision_pairs(const DualArmSystem& system);

/// Capsules spanning consecutive joint origins of one arm at configuration q_i.
std::vector<CapsuleShape> link_capsules(const WorldModel& world, int arm,
                                        const Eigen::VectorXd& q_i);

/// True iff any link or the object intersects an obstacle, the object, or a
/// registered self-collision pair. Passing nullopt for T_o places the object
/// at the pose implied by arm 0's end effector and its grasp transform.
/// `pair_tests`, when given, accumulates the number of primitive tests.
bool configuration_in_collision(const WorldModel& world, const JointVector& q,
                                const std::optional<Transform>& T_o,
                                long long* pair_tests = nullptr);

/// Checks every configuration with the object at the matching pose.
bool path_collision_free(const WorldModel& world, const std::vector<JointVector>& Q,
                         const std::vector<Pose6>& object_poses,
                         long long* pair_tests = nullptr);

/// Linear joint interpolation at max-norm spacing <= step, both endpoints
/// included, with the object held static at object_pose.
bool joint_segment_collision_free(const WorldModel& world, const JointVector& q_from,
                                  const JointVector& q_to, const Transform& object_pose,
                                  double step, long long* pair_tests = nullptr);

}  // namespace tcbirrt
