#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcbirrt/collision.hpp"
#include "tcbirrt/rng.hpp"

namespace tcbirrt {

struct PlannerParams {
  double step_xi = 0.6;                          // task-space extension step
  Vec6 bounds_lo = (Vec6() << -2, -3, 0, -3.14, -3.14, -3.14).finished();
  Vec6 bounds_hi = (Vec6() << 2, 3, 4, 3.14, 3.14, 3.14).finished();
  int interp = 5;                                // interpolation points per extension
  double timeout = 1000.0;                       // planning-clock seconds
  std::uint64_t seed = 0;
  double regrasp_budget = 5.0;                   // planning-clock seconds per connect attempt
  double equality_tol = 1e-9;                    // weighted task metric
  Vec6 nn_weights = Vec6::Ones();
  double joint_continuity = 0.5;                 // max rad between consecutive edge states
  double regrasp_edge_step = 0.3;                // rad
  double collision_step = 0.2;                   // rad
  double freeze_tol = 1e-6;                      // per-arm regrasp freeze, rad
};

/// Deterministic planning clock: elapsed time is derived from counted solver
/// work instead of the wall clock, so identically seeded runs stop at the
/// same point and report identical times. The per-operation costs are
/// calibrated against this library's measured throughput.
struct PlanClock {
  long long ik_iters = 0;
  long long pair_tests = 0;

  static constexpr double kIkIterSeconds = 8.5e-6;
  static constexpr double kPairTestSeconds = 7.0e-7;

  double seconds() const {
    return static_cast<double>(ik_iters) * kIkIterSeconds +
           static_cast<double>(pair_tests) * kPairTestSeconds;
  }
};

enum class ExtendStatus { Trapped, Advanced, Reached };

struct PlanNode {
  std::optional<JointVector> q;
  Pose6 xi;
  int parent = -1;
  std::vector<JointVector> edge_joint_path;   // parent q ... own q
  std::vector<Pose6> edge_object_poses;       // one per edge state
  std::vector<JointVector> edge_regrasp;      // junction node only
};

struct Tree {
  std::vector<PlanNode> nodes;

  static Tree WithRoot(const JointVector& q, const Pose6& xi);
  int add_node(PlanNode node);
  std::vector<int> chain_from_root(int id) const;
};

struct PathSegment {
  enum class Kind { Transport, Regrasp };
  Kind kind = Kind::Transport;
  std::vector<JointVector> joints;
  std::vector<Pose6> object_poses;  // one per state (transport) or exactly one (regrasp)
};

struct PlanStats {
  double planning_time = 0.0;  // planning-clock seconds
  double wall_time = 0.0;
  int iterations = 0;
  std::size_t tree_a_size = 0;
  std::size_t tree_b_size = 0;
  bool regrasp_occurred = false;
};

struct PlanResult {
  std::vector<PathSegment> segments;
  PlanStats stats;
};

enum class PlanFailure { None, Timeout, InvalidQuery };

struct PlanOutcome {
  std::optional<PlanResult> result;
  PlanFailure failure = PlanFailure::None;
  std::string diagnostic;
  PlanStats stats;

  bool success() const { return result.has_value(); }
};

Pose6 random_sample_t(const PlannerParams& params, Rng& rng);

/// Index of the tree node minimizing ||W (xi - xi_node)||_2; ties go to the
/// lowest node id.
int nearest_neighbor_t(const Tree& tree, const Pose6& xi, const Vec6& weights);

/// Steps from xi_near toward xi_rand by at most step_xi along the straight
/// line; lands exactly on xi_rand when it is within reach.
Vec6 step_toward(const Vec6& xi_near, const Vec6& xi_rand, double step_xi);

struct PoseInterpolation {
  std::vector<Vec3> positions;   // N+1 entries
  std::vector<Mat3> rotations;   // N+1 entries
  std::vector<Pose6> poses;      // N+1 entries, exact at both endpoints
};

/// Linear interpolation of position and of absolute rotation exponential
/// coordinates. Returns nullopt when the endpoints are a half-turn apart and
/// the sweep is ambiguous.
std::optional<PoseInterpolation> interpolate_pose(const Pose6& xi_from, const Pose6& xi_to, int n);

struct PathIkResult {
  std::vector<JointVector> joints;
  std::optional<JointVector> final_q;  // empty when some waypoint was unreachable
};

/// Solves IK waypoint by waypoint, seeding each solve with the previous
/// solution; stops at the first failure and returns the partial sequence.
PathIkResult path_inverse_kinematics(const DualArmSystem& system, const IKParams& ik,
                                     const std::vector<Vec3>& positions,
                                     const std::vector<Mat3>& rotations, const JointVector& q_init,
                                     long long* iters = nullptr);

struct ExtendTarget {
  Pose6 xi;
  std::optional<JointVector> q;
};

struct ExtendOutcome {
  int node_id = -1;
  ExtendStatus status = ExtendStatus::Trapped;
};

/// Task-space constrained bidirectional planner over the closed-chain
/// manifold, with a joint-space regrasp connector at tree junctions.
class Planner {
 public:
  Planner(const WorldModel& world, const IKParams& ik, const PlannerParams& params);

  PlanOutcome plan(const JointVector& q_init, const Pose6& xi_init, const JointVector& q_goal,
                   const Pose6& xi_goal);

  /// One constrained extension of `tree` from node `near_id` toward the
  /// target; exposed for tests.
  ExtendOutcome constrained_extend(Tree& tree, int near_id, const ExtendTarget& target);

  /// Joint-space bidirectional connector with the object held static. Arms
  /// whose endpoints already agree within freeze_tol are interpolated rather
  /// than planned. Returns the waypoint sequence q_from -> q_to, or nullopt
  /// when the budget runs out.
  std::optional<std::vector<JointVector>> rrt_connect(const JointVector& q_from,
                                                      const JointVector& q_to,
                                                      const Transform& object_pose);

  const PlanClock& clock() const { return clock_; }

  /// Empty when (q, xi) is a usable endpoint: on the constraint manifold,
  /// consistent under forward kinematics, and collision free. Otherwise a
  /// diagnostic naming the failed precondition, prefixed with `label`.
  std::string check_query(const JointVector& q, const Pose6& xi, const char* label);

 private:
  double weighted_distance(const Vec6& a, const Vec6& b) const;

  const WorldModel& world_;
  IKParams ik_;
  PlannerParams params_;
  Rng rng_;
  PlanClock clock_;
};

/// Concatenates the two root->junction branches and the junction regrasp
/// into a start-to-goal segment list. `a_holds_start` tells which tree is
/// rooted at the start after an even/odd number of swaps.
PlanResult extract_path(const Tree& tree_a, int junction_a, const Tree& tree_b, int junction_b,
                        bool a_holds_start);

}  // namespace tcbirrt
