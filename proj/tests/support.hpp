#pragma once

#include "tcbirrt/scene.hpp"

namespace test_util {

using namespace tcbirrt;

/// The 7-DOF arm used by the bundled desk scenes.
inline ManipulatorModel desk_arm(const Transform& base, double limit = 3.93) {
  ManipulatorModel arm;
  const double hp = M_PI / 2.0;
  arm.dh = {{0, hp, 0, 0},        {0, hp, 0.24, 0},      {0, 0, -0.17, 0},
            {0, 0, -0.18, 1.08},  {0, hp, -0.17, 1.08},  {0, hp, -0.24, 0},
            {0, 0, -0.1, 0}};
  arm.joint_limits.assign(7, {-limit, limit});
  arm.base = base;
  return arm;
}

inline DualArmSystem desk_system() {
  DualArmSystem sys;
  sys.arms[0] = desk_arm(Transform::FromTranslation({0, 0.55, 0}));
  sys.arms[1] = desk_arm(Transform::FromTranslation({0, -0.55, 0}));
  sys.grasp[0] = Transform::FromTranslation({1.15, 0, 0});
  sys.grasp[1] = Transform::FromTranslation({-1.15, 0, 0});
  return sys;
}

inline SceneConfig desk_scene() {
  SceneConfig s;
  s.system = desk_system();
  s.robot_geometry.link_radii = {std::vector<double>(7, 0.08), std::vector<double>(7, 0.08)};
  s.robot_geometry.object_half_extents = {1.0, 0.4, 0.4};
  s.self_collision_pairs = default_self_collision_pairs(s.system);
  s.nominal_start = {{0.9, 0.0, 0.9}, {0, 0, M_PI / 2}};
  s.nominal_goal = {{0.0, 0.0, 1.5}, {0, 0, M_PI / 2}};
  s.ik.eps_p = 2e-4;
  s.ik.eps_o = 2e-4;
  s.planner.bounds_lo << -2, -2, 0.2, -3.14, -3.14, -3.14;
  s.planner.bounds_hi << 2, 2, 2.2, 3.14, 3.14, 3.14;
  s.planner.timeout = 60;
  s.seed = 1;
  s.planner.seed = 1;
  Eigen::VectorXd seed(14);
  seed << 0.014, 0.438, 2.434, 2.434, 1.416, 0.438, 1.556,
          3.127, 1.913, 2.434, 2.434, 1.416, 1.913, -1.556;
  auto q = ik_dual(s.system, seed, pose_to_transform(s.nominal_start), s.ik);
  REQUIRE(q.has_value());
  s.nominal_q = *q;
  return s;
}

}  // namespace test_util
