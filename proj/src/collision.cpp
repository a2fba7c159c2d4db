#include "tcbirrt/collision.hpp"

#include <cmath>

namespace tcbirrt {

namespace {

struct Overloaded {
  const Transform& T;
  Shape operator()(const BoxShape& b) const { return BoxShape{b.half_extents, T * b.pose}; }
  Shape operator()(const CapsuleShape& c) const { return CapsuleShape{c.radius, T * c.p0, T * c.p1}; }
  Shape operator()(const SphereShape& s) const { return SphereShape{s.radius, T * s.center}; }
};

}  // namespace

Shape transformed(const Shape& s, const Transform& T) {
  return std::visit(Overloaded{T}, s);
}

double point_segment_distance(const Vec3& x, const Vec3& p0, const Vec3& p1) {
  const Vec3 d = p1 - p0;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-30) {
    return (x - p0).norm();
  }
  const double t = std::clamp((x - p0).dot(d) / len2, 0.0, 1.0);
  return (x - (p0 + t * d)).norm();
}

// Closest distance between segments [p0,p1] and [q0,q1] (Ericson 5.1.9).
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a < 1e-30 && e < 1e-30) {
    return r.norm();
  }
  if (a < 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e < 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-30 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double point_box_distance(const Vec3& x, const BoxShape& box) {
  const Vec3 local = box.pose.inverse() * x;
  Vec3 excess = local.cwiseAbs() - box.half_extents;
  excess = excess.cwiseMax(0.0);
  return excess.norm();
}

double segment_box_distance(const Vec3& p0, const Vec3& p1, const BoxShape& box) {
  const Transform inv = box.pose.inverse();
  const Vec3 a = inv * p0;
  const Vec3 b = inv * p1;
  const auto d2 = [&](double t) {
    Vec3 excess = (a + t * (b - a)).cwiseAbs() - box.half_extents;
    return excess.cwiseMax(0.0).squaredNorm();
  };
  // d2 is convex in t; ternary search converges to the minimizer.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (d2(m1) <= d2(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::sqrt(d2(0.5 * (lo + hi)));
}

namespace {

// Separating-axis test; reports intersection unless a strictly separating
// axis exists, so exact touching counts as collision.
bool box_box_intersect(const BoxShape& A, const BoxShape& B) {
  const Mat3& Ra = A.pose.R;
  const Mat3& Rb = B.pose.R;
  const Mat3 C = Ra.transpose() * Rb;
  const Mat3 absC = C.cwiseAbs() + Mat3::Constant(1e-12);
  const Vec3 t = Ra.transpose() * (B.pose.p - A.pose.p);
  const Vec3& ha = A.half_extents;
  const Vec3& hb = B.half_extents;

  for (int i = 0; i < 3; ++i) {  // faces of A
    if (std::abs(t[i]) > ha[i] + absC.row(i).dot(hb)) {
      return false;
    }
  }
  for (int j = 0; j < 3; ++j) {  // faces of B
    if (std::abs(t.dot(C.col(j))) > absC.col(j).dot(ha) + hb[j]) {
      return false;
    }
  }
  for (int i = 0; i < 3; ++i) {  // edge-edge axes a_i x b_j
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      const double ra = ha[i1] * absC(i2, j) + ha[i2] * absC(i1, j);
      const double rb = hb[j1] * absC(i, j2) + hb[j2] * absC(i, j1);
      const double dist = std::abs(t[i2] * C(i1, j) - t[i1] * C(i2, j));
      if (dist > ra + rb) {
        return false;
      }
    }
  }
  return true;
}

struct IntersectVisitor {
  bool operator()(const SphereShape& a, const SphereShape& b) const {
    return (a.center - b.center).norm() <= a.radius + b.radius;
  }
  bool operator()(const SphereShape& a, const CapsuleShape& b) const {
    return point_segment_distance(a.center, b.p0, b.p1) <= a.radius + b.radius;
  }
  bool operator()(const SphereShape& a, const BoxShape& b) const {
    return point_box_distance(a.center, b) <= a.radius;
  }
  bool operator()(const CapsuleShape& a, const CapsuleShape& b) const {
    return segment_segment_distance(a.p0, a.p1, b.p0, b.p1) <= a.radius + b.radius;
  }
  bool operator()(const CapsuleShape& a, const BoxShape& b) const {
    return segment_box_distance(a.p0, a.p1, b) <= a.radius;
  }
  bool operator()(const BoxShape& a, const BoxShape& b) const { return box_box_intersect(a, b); }
  bool operator()(const CapsuleShape& a, const SphereShape& b) const { return (*this)(b, a); }
  bool operator()(const BoxShape& a, const SphereShape& b) const { return (*this)(b, a); }
  bool operator()(const BoxShape& a, const CapsuleShape& b) const { return (*this)(b, a); }
};

}  // namespace

bool shapes_intersect(const Shape& a, const Shape& b) {
  return std::visit(IntersectVisitor{}, a, b);
}

std::vector<std::pair<LinkRef, LinkRef>> default_self_collision_pairs(
    const DualArmSystem& system) {
  std::vector<std::pair<LinkRef, LinkRef>> pairs;
  for (int i = 0; i < system.arms[0].dof(); ++i) {
    for (int j = 0; j < system.arms[1].dof(); ++j) {
      pairs.push_back({LinkRef{0, i}, LinkRef{1, j}});
    }
  }
  return pairs;
}

std::vector<CapsuleShape> link_capsules(const WorldModel& world, int arm,
                                        const Eigen::VectorXd& q_i) {
  const ManipulatorModel& model = world.system.arms[static_cast<std::size_t>(arm)];
  const FKResult fk = forward_kinematics(model, q_i);
  std::vector<CapsuleShape> capsules;
  capsules.reserve(fk.links.size());
  Vec3 prev = model.base.p;
  for (std::size_t j = 0; j < fk.links.size(); ++j) {
    capsules.push_back(
        CapsuleShape{world.robot.link_radii[static_cast<std::size_t>(arm)][j], prev, fk.links[j].p});
    prev = fk.links[j].p;
  }
  return capsules;
}

namespace {

bool test_pair(const Shape& a, const Shape& b, long long* pair_tests) {
  if (pair_tests != nullptr) {
    ++*pair_tests;
  }
  return shapes_intersect(a, b);
}

}  // namespace

bool configuration_in_collision(const WorldModel& world, const JointVector& q,
                                const std::optional<Transform>& T_o, long long* pair_tests) {
  std::array<std::vector<CapsuleShape>, 2> links = {
      link_capsules(world, 0, world.system.arm_segment(q, 0)),
      link_capsules(world, 1, world.system.arm_segment(q, 1))};

  Transform object_pose;
  if (T_o) {
    object_pose = *T_o;
  } else {
    const Transform ee0 =
        forward_kinematics(world.system.arms[0], world.system.arm_segment(q, 0)).ee;
    object_pose = ee0 * world.system.grasp[0].inverse();
  }
  const Shape object = BoxShape{world.robot.object_half_extents, object_pose};

  for (const Shape& obstacle : world.obstacles) {
    for (int arm = 0; arm < 2; ++arm) {
      for (const CapsuleShape& link : links[static_cast<std::size_t>(arm)]) {
        if (test_pair(Shape{link}, obstacle, pair_tests)) {
          return true;
        }
      }
    }
    if (test_pair(object, obstacle, pair_tests)) {
      return true;
    }
  }
  for (int arm = 0; arm < 2; ++arm) {
    for (const CapsuleShape& link : links[static_cast<std::size_t>(arm)]) {
      if (test_pair(object, Shape{link}, pair_tests)) {
        return true;
      }
    }
  }
  for (const auto& [lhs, rhs] : world.self_collision_pairs) {
    const CapsuleShape& a = links[static_cast<std::size_t>(lhs.arm)][static_cast<std::size_t>(lhs.link)];
    const CapsuleShape& b = links[static_cast<std::size_t>(rhs.arm)][static_cast<std::size_t>(rhs.link)];
    if (test_pair(Shape{a}, Shape{b}, pair_tests)) {
      return true;
    }
  }
  return false;
}

bool path_collision_free(const WorldModel& world, const std::vector<JointVector>& Q,
                         const std::vector<Pose6>& object_poses, long long* pair_tests) {
  for (std::size_t j = 0; j < Q.size(); ++j) {
    if (configuration_in_collision(world, Q[j], pose_to_transform(object_poses[j]), pair_tests)) {
      return false;
    }
  }
  return true;
}

bool joint_segment_collision_free(const WorldModel& world, const JointVector& q_from,
                                  const JointVector& q_to, const Transform& object_pose,
                                  double step, long long* pair_tests) {
  const double span = (q_to - q_from).lpNorm<Eigen::Infinity>();
  const int segments = span > 0.0 ? static_cast<int>(std::ceil(span / step)) : 0;
  for (int i = 0; i <= segments; ++i) {
    const double t = segments > 0 ? static_cast<double>(i) / segments : 0.0;
    const JointVector q = q_from + t * (q_to - q_from);
    if (configuration_in_collision(world, q, object_pose, pair_tests)) {
      return false;
    }
  }
  return true;
}

}  // namespace tcbirrt
