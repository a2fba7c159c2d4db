#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tcbirrt/se3.hpp"

namespace tcbirrt {

/// Concatenated joint angles of both arms, [q1; q2].
using JointVector = Eigen::VectorXd;

/// One row of a classic (distal) DH table. The link transform is
/// Rz(theta_offset + q) * Tz(d) * Tx(a) * Rx(alpha).
struct DHRow {
  double theta_offset = 0.0;  // rad
  double alpha = 0.0;         // rad
  double d = 0.0;             // m
  double a = 0.0;             // m
};

struct ManipulatorModel {
  std::vector<DHRow> dh;
  std::vector<std::array<double, 2>> joint_limits;  // [lo, hi] per joint, rad
  Transform base;

  int dof() const { return static_cast<int>(dh.size()); }
};

/// Two arms rigidly grasping one object. grasp[i] is the end-effector frame
/// of arm i expressed in the object frame, constant for the whole plan.
struct DualArmSystem {
  std::array<ManipulatorModel, 2> arms;
  std::array<Transform, 2> grasp;

  int dof() const { return arms[0].dof() + arms[1].dof(); }
  Eigen::VectorXd arm_segment(const JointVector& q, int arm) const;
  JointVector join(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2) const;
};

struct IKParams {
  Vec6 gain = Vec6::Ones();  // diagonal of the error gain matrix
  double step = 0.5;
  int max_iters = 200;
  double eps_p = 1e-3;    // m
  double eps_o = 1e-3;    // rad
  double damping = 1e-4;  // damped pseudoinverse mu
};

struct FKResult {
  std::vector<Transform> links;  // frame after each joint, world coordinates
  Transform ee;
};

FKResult forward_kinematics(const ManipulatorModel& model, const Eigen::VectorXd& q);

/// Geometric Jacobian in world coordinates; column j is
/// [z_j x (p_ee - p_j); z_j] for revolute joint j.
Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const ManipulatorModel& model,
                                                  const Eigen::VectorXd& q);

/// SVD pseudoinverse with singular values mapped to s / (s^2 + damping^2);
/// values below 1e-8 are dropped.
Eigen::MatrixXd damped_pseudoinverse(const Eigen::Matrix<double, 6, Eigen::Dynamic>& J,
                                     double damping);

/// Desired end-effector transforms for an object held at T_o.
std::array<Transform, 2> object_to_ee_targets(const Transform& T_o, const DualArmSystem& system);

/// Deviation vector of the closed-chain constraint at q. Zero iff the chain
/// closes exactly; position part in meters, orientation part in radians.
Vec6 closed_chain_deviation(const DualArmSystem& system, const JointVector& q);

/// Worst-case deviation of a configuration whose arms each satisfy their IK
/// tolerances. The position part includes the grasp separation lever through
/// which an orientation error of one end effector displaces the other.
struct ChainTolerance {
  double pos = 0.0;  // m
  double ori = 0.0;  // rad
};
ChainTolerance chain_tolerance(const DualArmSystem& system, const IKParams& params);

/// Iterative Jacobian-pseudoinverse IK for one arm. Returns the joint vector
/// whose FK errors are below (eps_p, eps_o), or nullopt when the budget runs
/// out or the iterate stops moving against the joint limits. `iters`, when
/// given, accumulates the number of update steps performed.
std::optional<Eigen::VectorXd> ik_single(const ManipulatorModel& model,
                                         const Eigen::VectorXd& q_seed, const Vec3& p_g,
                                         const Mat3& R_g, const IKParams& params,
                                         long long* iters = nullptr);

/// Solves both arms sequentially against the targets implied by the object
/// pose. Fails if either arm fails; `failed_arm` then holds its index.
std::optional<JointVector> ik_dual(const DualArmSystem& system, const JointVector& q_seed,
                                   const Transform& T_o, const IKParams& params,
                                   int* failed_arm = nullptr, long long* iters = nullptr);

}  // namespace tcbirrt
