#include "tcbirrt/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace tcbirrt {

Tree Tree::WithRoot(const JointVector& q, const Pose6& xi) {
  Tree t;
  PlanNode root;
  root.q = q;
  root.xi = xi;
  root.parent = -1;
  t.nodes.push_back(std::move(root));
  return t;
}

int Tree::add_node(PlanNode node) {
  nodes.push_back(std::move(node));
  return static_cast<int>(nodes.size()) - 1;
}

std::vector<int> Tree::chain_from_root(int id) const {
  std::vector<int> chain;
  for (int cur = id; cur >= 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
    chain.push_back(cur);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

Pose6 random_sample_t(const PlannerParams& params, Rng& rng) {
  Vec6 v;
  for (int i = 0; i < 6; ++i) {
    v[i] = rng.uniform(params.bounds_lo[i], params.bounds_hi[i]);
  }
  return Pose6::FromVec(v);
}

int nearest_neighbor_t(const Tree& tree, const Pose6& xi, const Vec6& weights) {
  const Vec6 target = xi.vec();
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const double d = (weights.asDiagonal() * (target - tree.nodes[i].xi.vec())).norm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Vec6 step_toward(const Vec6& xi_near, const Vec6& xi_rand, double step_xi) {
  const Vec6 diff = xi_rand - xi_near;
  const double dist = diff.norm();
  if (dist <= step_xi || dist < 1e-30) {
    return xi_rand;
  }
  return xi_near + (step_xi / dist) * diff;
}

std::optional<PoseInterpolation> interpolate_pose(const Pose6& xi_from, const Pose6& xi_to,
                                                  int n) {
  n = std::max(n, 1);
  if ((xi_from.vec() - xi_to.vec()).lpNorm<Eigen::Infinity>() == 0.0) {
    PoseInterpolation out;
    const Transform T = pose_to_transform(xi_from);
    out.positions.assign(static_cast<std::size_t>(n) + 1, T.p);
    out.rotations.assign(static_cast<std::size_t>(n) + 1, T.R);
    out.poses.assign(static_cast<std::size_t>(n) + 1, xi_from);
    return out;
  }
  const Mat3 R_from = pose_to_transform(xi_from).R;
  const Mat3 R_to = pose_to_transform(xi_to).R;
  if (M_PI - rotation_angle_between(R_from, R_to) < 1e-6) {
    return std::nullopt;  // half-turn sweep, direction ambiguous
  }
  const Vec3 phi_from = rotation_to_expcoords(R_from);
  const Vec3 phi_to = rotation_to_expcoords(R_to);
  PoseInterpolation out;
  out.positions.reserve(static_cast<std::size_t>(n) + 1);
  out.rotations.reserve(static_cast<std::size_t>(n) + 1);
  out.poses.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double s = static_cast<double>(j) / n;
    const Vec3 p = xi_from.p + s * (xi_to.p - xi_from.p);
    Mat3 R;
    if (j == 0) {
      R = R_from;
    } else if (j == n) {
      R = R_to;
    } else {
      R = expcoords_to_rotation(phi_from + s * (phi_to - phi_from));
    }
    out.positions.push_back(p);
    out.rotations.push_back(R);
    if (j == 0) {
      out.poses.push_back(xi_from);
    } else if (j == n) {
      out.poses.push_back(xi_to);
    } else {
      out.poses.push_back(transform_to_pose({R, p}));
    }
  }
  return out;
}

PathIkResult path_inverse_kinematics(const DualArmSystem& system, const IKParams& ik,
                                     const std::vector<Vec3>& positions,
                                     const std::vector<Mat3>& rotations,
                                     const JointVector& q_init, long long* iters) {
  PathIkResult out;
  out.joints.reserve(positions.size());
  JointVector seed = q_init;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    const Transform T_o{rotations[j], positions[j]};
    auto q = ik_dual(system, seed, T_o, ik, nullptr, iters);
    if (!q) {
      return out;  // final_q left empty
    }
    out.joints.push_back(*q);
    seed = *q;
  }
  out.final_q = seed;
  return out;
}

Planner::Planner(const WorldModel& world, const IKParams& ik, const PlannerParams& params)
    : world_(world), ik_(ik), params_(params), rng_(params.seed) {}

double Planner::weighted_distance(const Vec6& a, const Vec6& b) const {
  return (params_.nn_weights.asDiagonal() * (a - b)).norm();
}

std::string Planner::check_query(const JointVector& q, const Pose6& xi, const char* label) {
  std::ostringstream msg;
  const ChainTolerance tol = chain_tolerance(world_.system, ik_);
  const Vec6 h = closed_chain_deviation(world_.system, q);
  if (h.head<3>().norm() > tol.pos || h.tail<3>().norm() > tol.ori) {
    msg << label << " configuration violates the closed-chain constraint (deviation "
        << h.head<3>().norm() << " m, " << h.tail<3>().norm() << " rad)";
    return msg.str();
  }
  const Transform T_xi = pose_to_transform(xi);
  const Transform implied =
      forward_kinematics(world_.system.arms[0], world_.system.arm_segment(q, 0)).ee *
      world_.system.grasp[0].inverse();
  // An end-effector rotation error is levered by the grasp offset when
  // mapped to the object frame.
  const double lever = world_.system.grasp[0].p.norm();
  if ((implied.p - T_xi.p).norm() > 2.0 * (ik_.eps_p + lever * ik_.eps_o) ||
      rotation_angle_between(implied.R, T_xi.R) > 2.0 * ik_.eps_o) {
    msg << label << " pose disagrees with the configuration's forward kinematics";
    return msg.str();
  }
  if (configuration_in_collision(world_, q, T_xi, &clock_.pair_tests)) {
    msg << label << " state is in collision";
    return msg.str();
  }
  return {};
}

ExtendOutcome Planner::constrained_extend(Tree& tree, int near_id, const ExtendTarget& target) {
  const Pose6 xi_near = tree.nodes[static_cast<std::size_t>(near_id)].xi;
  const JointVector q_near = *tree.nodes[static_cast<std::size_t>(near_id)].q;

  // Already at the target pose: nothing to extend, but a junction with a
  // concrete far-side configuration still needs the regrasp connector.
  if (weighted_distance(target.xi.vec(), xi_near.vec()) <= params_.equality_tol) {
    if (target.q) {
      auto regrasp = rrt_connect(q_near, *target.q, pose_to_transform(xi_near));
      if (!regrasp) {
        return {near_id, ExtendStatus::Trapped};
      }
      tree.nodes[static_cast<std::size_t>(near_id)].edge_regrasp = std::move(*regrasp);
      return {near_id, ExtendStatus::Reached};
    }
    return {near_id, ExtendStatus::Reached};
  }

  const Pose6 xi_s = Pose6::FromVec(step_toward(xi_near.vec(), target.xi.vec(), params_.step_xi));
  auto interp = interpolate_pose(xi_near, xi_s, params_.interp);
  if (!interp) {
    return {near_id, ExtendStatus::Trapped};
  }
  PathIkResult pik = path_inverse_kinematics(world_.system, ik_, interp->positions,
                                             interp->rotations, q_near, &clock_.ik_iters);
  if (!pik.final_q) {
    return {near_id, ExtendStatus::Trapped};
  }
  for (std::size_t j = 1; j < pik.joints.size(); ++j) {
    if ((pik.joints[j] - pik.joints[j - 1]).lpNorm<Eigen::Infinity>() >
        params_.joint_continuity) {
      return {near_id, ExtendStatus::Trapped};  // IK branch flip between waypoints
    }
  }
  if (!path_collision_free(world_, pik.joints, interp->poses, &clock_.pair_tests)) {
    return {near_id, ExtendStatus::Trapped};
  }

  JointVector q_s = *pik.final_q;
  const bool arrived = weighted_distance(target.xi.vec(), xi_s.vec()) <= params_.equality_tol;

  std::vector<JointVector> regrasp_path;
  if (arrived && target.q) {
    auto regrasp = rrt_connect(q_s, *target.q, pose_to_transform(xi_s));
    if (!regrasp) {
      return {near_id, ExtendStatus::Trapped};
    }
    regrasp_path = std::move(*regrasp);
  }

  PlanNode node;
  node.q = q_s;
  node.xi = xi_s;
  node.parent = near_id;
  node.edge_joint_path = std::move(pik.joints);
  node.edge_object_poses = std::move(interp->poses);
  node.edge_regrasp = std::move(regrasp_path);
  const int id = tree.add_node(std::move(node));
  return {id, arrived ? ExtendStatus::Reached : ExtendStatus::Advanced};
}

std::optional<std::vector<JointVector>> Planner::rrt_connect(const JointVector& q_from,
                                                             const JointVector& q_to,
                                                             const Transform& object_pose) {
  const double start_time = clock_.seconds();
  const auto out_of_budget = [&] {
    const double now = clock_.seconds();
    return now - start_time >= params_.regrasp_budget || now >= params_.timeout;
  };

  const DualArmSystem& system = world_.system;
  const int n0 = system.arms[0].dof();
  const int n1 = system.arms[1].dof();

  const std::array<bool, 2> frozen = {
      (q_from.head(n0) - q_to.head(n0)).lpNorm<Eigen::Infinity>() <= params_.freeze_tol,
      (q_from.tail(n1) - q_to.tail(n1)).lpNorm<Eigen::Infinity>() <= params_.freeze_tol};
  if (frozen[0] && frozen[1]) {
    return std::vector<JointVector>{q_from};  // nothing to regrasp
  }

  std::vector<int> active;
  for (int j = 0; j < n0 + n1; ++j) {
    if (!frozen[j < n0 ? 0 : 1]) {
      active.push_back(j);
    }
  }
  const int na = static_cast<int>(active.size());

  const auto to_active = [&](const JointVector& q) {
    Eigen::VectorXd a(na);
    for (int i = 0; i < na; ++i) {
      a[i] = q[active[static_cast<std::size_t>(i)]];
    }
    return a;
  };
  // Frozen joints are pinned at their start values while planning.
  const auto to_full = [&](const Eigen::VectorXd& a) {
    JointVector q = q_from;
    for (int i = 0; i < na; ++i) {
      q[active[static_cast<std::size_t>(i)]] = a[i];
    }
    return q;
  };

  const Eigen::VectorXd a_from = to_active(q_from);
  const Eigen::VectorXd a_to = to_active(q_to);

  if (configuration_in_collision(world_, q_from, object_pose, &clock_.pair_tests) ||
      configuration_in_collision(world_, to_full(a_to), object_pose, &clock_.pair_tests)) {
    return std::nullopt;
  }

  const auto edge_free = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return joint_segment_collision_free(world_, to_full(a), to_full(b), object_pose,
                                        params_.collision_step, &clock_.pair_tests);
  };

  // Interpolates the frozen joints from q_from to q_to across the waypoints
  // so that both endpoints are reproduced exactly.
  const auto finalize = [&](const std::vector<Eigen::VectorXd>& act_path) {
    std::vector<JointVector> path;
    path.reserve(act_path.size());
    const int m = static_cast<int>(act_path.size());
    for (int i = 0; i < m; ++i) {
      const double t = m > 1 ? static_cast<double>(i) / (m - 1) : 1.0;
      JointVector q = q_from + t * (q_to - q_from);
      for (int k = 0; k < na; ++k) {
        q[active[static_cast<std::size_t>(k)]] = act_path[static_cast<std::size_t>(i)][k];
      }
      path.push_back(std::move(q));
    }
    path.front() = q_from;
    path.back() = q_to;
    return path;
  };

  if (edge_free(a_from, a_to)) {
    return finalize({a_from, a_to});
  }

  struct JointNode {
    Eigen::VectorXd a;
    int parent;
  };
  std::vector<JointNode> tree_from{{a_from, -1}};
  std::vector<JointNode> tree_to{{a_to, -1}};

  const auto nearest = [](const std::vector<JointNode>& t, const Eigen::VectorXd& x) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = (t[i].a - x).norm();
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  };
  // Single RRT-Connect extension step; returns the new node id or -1.
  const auto extend = [&](std::vector<JointNode>& t, const Eigen::VectorXd& x) {
    const int ni = nearest(t, x);
    const Eigen::VectorXd& qn = t[static_cast<std::size_t>(ni)].a;
    const double d = (x - qn).norm();
    if (d < 1e-12) {
      return ni;
    }
    const Eigen::VectorXd qs =
        d <= params_.regrasp_edge_step ? x : (qn + (params_.regrasp_edge_step / d) * (x - qn)).eval();
    if (!edge_free(qn, qs)) {
      return -1;
    }
    t.push_back({qs, ni});
    return static_cast<int>(t.size()) - 1;
  };
  const auto chain = [](const std::vector<JointNode>& t, int id) {
    std::vector<Eigen::VectorXd> out;
    for (int cur = id; cur >= 0; cur = t[static_cast<std::size_t>(cur)].parent) {
      out.push_back(t[static_cast<std::size_t>(cur)].a);
    }
    std::reverse(out.begin(), out.end());
    return out;
  };

  bool grow_from_side = true;
  while (!out_of_budget()) {
    Eigen::VectorXd a_rand(na);
    for (int i = 0; i < na; ++i) {
      const int j = active[static_cast<std::size_t>(i)];
      const ManipulatorModel& arm = system.arms[j < n0 ? 0 : 1];
      const auto& lim = arm.joint_limits[static_cast<std::size_t>(j < n0 ? j : j - n0)];
      a_rand[i] = rng_.uniform(lim[0], lim[1]);
    }
    auto& grow = grow_from_side ? tree_from : tree_to;
    auto& other = grow_from_side ? tree_to : tree_from;
    const int new_id = extend(grow, a_rand);
    if (new_id >= 0) {
      const Eigen::VectorXd target = grow[static_cast<std::size_t>(new_id)].a;
      int last = -1;
      while (!out_of_budget()) {
        const int id = extend(other, target);
        if (id < 0) {
          break;
        }
        last = id;
        if ((other[static_cast<std::size_t>(id)].a - target).norm() < 1e-12) {
          const int from_junction = grow_from_side ? new_id : last;
          const int to_junction = grow_from_side ? last : new_id;
          std::vector<Eigen::VectorXd> fwd = chain(tree_from, from_junction);
          std::vector<Eigen::VectorXd> bwd = chain(tree_to, to_junction);
          std::reverse(bwd.begin(), bwd.end());
          // Both chains end on the shared junction state; drop the duplicate.
          fwd.insert(fwd.end(), bwd.begin() + 1, bwd.end());
          return finalize(fwd);
        }
      }
    }
    grow_from_side = !grow_from_side;
  }
  return std::nullopt;
}

namespace {

PathSegment make_transport(std::vector<JointVector> joints, std::vector<Pose6> poses) {
  PathSegment seg;
  seg.kind = PathSegment::Kind::Transport;
  seg.joints = std::move(joints);
  seg.object_poses = std::move(poses);
  return seg;
}

std::vector<PathSegment> branch_segments(const Tree& tree, int junction) {
  std::vector<PathSegment> segs;
  for (int id : tree.chain_from_root(junction)) {
    const PlanNode& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.parent < 0) {
      continue;
    }
    segs.push_back(make_transport(node.edge_joint_path, node.edge_object_poses));
  }
  return segs;
}

void reverse_segment(PathSegment& seg) {
  std::reverse(seg.joints.begin(), seg.joints.end());
  std::reverse(seg.object_poses.begin(), seg.object_poses.end());
}

}  // namespace

PlanResult extract_path(const Tree& tree_a, int junction_a, const Tree& tree_b, int junction_b,
                        bool a_holds_start) {
  const Pose6 xi_junction = tree_a.nodes[static_cast<std::size_t>(junction_a)].xi;
  const JointVector q_junction_a = *tree_a.nodes[static_cast<std::size_t>(junction_a)].q;
  const JointVector q_junction_b = *tree_b.nodes[static_cast<std::size_t>(junction_b)].q;

  // Stored on the b-side junction node, running q_b -> q_a.
  const std::vector<JointVector>& stored = tree_b.nodes[static_cast<std::size_t>(junction_b)].edge_regrasp;
  const bool emit_regrasp = stored.size() >= 2;

  std::vector<PathSegment> a_side = branch_segments(tree_a, junction_a);
  std::vector<PathSegment> b_side = branch_segments(tree_b, junction_b);

  // When the junction configurations already agree (within the freeze
  // tolerance) no regrasp segment is emitted and the junction state of one
  // side is adopted by the other, preferring to keep the query endpoints
  // untouched.
  if (!emit_regrasp) {
    if (!b_side.empty()) {
      b_side.back().joints.back() = q_junction_a;
    } else if (!a_side.empty()) {
      a_side.back().joints.back() = q_junction_b;
    }
  }

  PlanResult result;
  auto& segs = result.segments;

  if (a_holds_start) {
    segs = a_side;
    if (emit_regrasp) {
      PathSegment reg;
      reg.kind = PathSegment::Kind::Regrasp;
      reg.joints.assign(stored.rbegin(), stored.rend());  // q_a -> q_b
      reg.object_poses = {xi_junction};
      segs.push_back(std::move(reg));
    }
    for (auto it = b_side.rbegin(); it != b_side.rend(); ++it) {
      PathSegment seg = *it;
      reverse_segment(seg);
      segs.push_back(std::move(seg));
    }
  } else {
    segs = b_side;
    if (emit_regrasp) {
      PathSegment reg;
      reg.kind = PathSegment::Kind::Regrasp;
      reg.joints = stored;  // q_b -> q_a
      reg.object_poses = {xi_junction};
      segs.push_back(std::move(reg));
    }
    for (auto it = a_side.rbegin(); it != a_side.rend(); ++it) {
      PathSegment seg = *it;
      reverse_segment(seg);
      segs.push_back(std::move(seg));
    }
  }

  if (segs.empty()) {
    // Both junctions are tree roots: the query endpoints already coincide up
    // to the freeze tolerance.
    PathSegment seg;
    seg.kind = PathSegment::Kind::Transport;
    if (a_holds_start) {
      seg.joints = {q_junction_a, q_junction_b};
    } else {
      seg.joints = {q_junction_b, q_junction_a};
    }
    if ((seg.joints[0] - seg.joints[1]).lpNorm<Eigen::Infinity>() == 0.0) {
      seg.joints.pop_back();
    }
    seg.object_poses.assign(seg.joints.size(), xi_junction);
    segs.push_back(std::move(seg));
  }

  result.stats.regrasp_occurred = emit_regrasp;
  return result;
}

PlanOutcome Planner::plan(const JointVector& q_init, const Pose6& xi_init,
                          const JointVector& q_goal, const Pose6& xi_goal) {
  const auto wall_start = std::chrono::steady_clock::now();
  clock_ = {};
  PlanOutcome out;
  const auto fill_stats = [&](PlanStats& stats) {
    stats.planning_time = clock_.seconds();
    stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  std::string diag = check_query(q_init, xi_init, "start");
  if (diag.empty()) {
    diag = check_query(q_goal, xi_goal, "goal");
  }
  if (!diag.empty()) {
    out.failure = PlanFailure::InvalidQuery;
    out.diagnostic = std::move(diag);
    fill_stats(out.stats);
    return out;
  }

  if (weighted_distance(xi_init.vec(), xi_goal.vec()) <= params_.equality_tol &&
      (q_init - q_goal).lpNorm<Eigen::Infinity>() == 0.0) {
    PlanResult result;
    result.segments.push_back(make_transport({q_init}, {xi_init}));
    fill_stats(result.stats);
    result.stats.tree_a_size = result.stats.tree_b_size = 1;
    out.stats = result.stats;
    out.result = std::move(result);
    return out;
  }

  Tree ta = Tree::WithRoot(q_init, xi_init);
  Tree tb = Tree::WithRoot(q_goal, xi_goal);
  bool a_holds_start = true;
  int iterations = 0;

  while (clock_.seconds() < params_.timeout) {
    ++iterations;
    const Pose6 xi_rand = random_sample_t(params_, rng_);
    const int near_a = nearest_neighbor_t(ta, xi_rand, params_.nn_weights);
    const ExtendOutcome ra = constrained_extend(ta, near_a, {xi_rand, std::nullopt});
    if (ra.status != ExtendStatus::Trapped) {
      const PlanNode& reach_a = ta.nodes[static_cast<std::size_t>(ra.node_id)];
      const ExtendTarget target{reach_a.xi, reach_a.q};
      int near_b = nearest_neighbor_t(tb, target.xi, params_.nn_weights);
      ExtendOutcome rb = constrained_extend(tb, near_b, target);
      while (rb.status == ExtendStatus::Advanced) {
        near_b = nearest_neighbor_t(tb, target.xi, params_.nn_weights);
        rb = constrained_extend(tb, near_b, target);
      }
      if (rb.status == ExtendStatus::Reached) {
        PlanResult result = extract_path(ta, ra.node_id, tb, rb.node_id, a_holds_start);
        fill_stats(result.stats);
        result.stats.iterations = iterations;
        result.stats.tree_a_size = a_holds_start ? ta.nodes.size() : tb.nodes.size();
        result.stats.tree_b_size = a_holds_start ? tb.nodes.size() : ta.nodes.size();
        out.stats = result.stats;
        out.result = std::move(result);
        return out;
      }
    }
    std::swap(ta, tb);
    a_holds_start = !a_holds_start;
  }

  out.failure = PlanFailure::Timeout;
  {
    std::ostringstream msg;
    msg << "no path found within " << params_.timeout << " planning seconds";
    out.diagnostic = msg.str();
  }
  fill_stats(out.stats);
  out.stats.iterations = iterations;
  out.stats.tree_a_size = a_holds_start ? ta.nodes.size() : tb.nodes.size();
  out.stats.tree_b_size = a_holds_start ? tb.nodes.size() : ta.nodes.size();
  return out;
}

}  // namespace tcbirrt
