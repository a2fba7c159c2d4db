#include "tcbirrt/kinematics.hpp"

#include <cmath>

namespace tcbirrt {

namespace {

Transform dh_transform(const DHRow& row, double q) {
  const double theta = row.theta_offset + q;
  Transform t;
  t.R = rot_z(theta) * rot_x(row.alpha);
  t.p = Vec3(row.a * std::cos(theta), row.a * std::sin(theta), row.d);
  return t;
}

void clamp_to_limits(const ManipulatorModel& model, Eigen::VectorXd& q) {
  for (int j = 0; j < model.dof(); ++j) {
    q[j] = std::clamp(q[j], model.joint_limits[j][0], model.joint_limits[j][1]);
  }
}

}  // namespace

Eigen::VectorXd DualArmSystem::arm_segment(const JointVector& q, int arm) const {
  const int n0 = arms[0].dof();
  return arm == 0 ? q.head(n0) : q.tail(arms[1].dof());
}

JointVector DualArmSystem::join(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2) const {
  JointVector q(q1.size() + q2.size());
  q << q1, q2;
  return q;
}

FKResult forward_kinematics(const ManipulatorModel& model, const Eigen::VectorXd& q) {
  FKResult out;
  out.links.reserve(model.dh.size());
  Transform t = model.base;
  for (std::size_t j = 0; j < model.dh.size(); ++j) {
    t = t * dh_transform(model.dh[j], q[static_cast<int>(j)]);
    out.links.push_back(t);
  }
  out.ee = t;
  return out;
}

Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const ManipulatorModel& model,
                                                  const Eigen::VectorXd& q) {
  const int n = model.dof();
  Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, n);
  // Joint j rotates about the z axis of the frame preceding it.
  std::vector<Transform> prefix(static_cast<std::size_t>(n));
  Transform t = model.base;
  for (int j = 0; j < n; ++j) {
    prefix[static_cast<std::size_t>(j)] = t;
    t = t * dh_transform(model.dh[static_cast<std::size_t>(j)], q[j]);
  }
  const Vec3 p_ee = t.p;
  for (int j = 0; j < n; ++j) {
    const Vec3 z = prefix[static_cast<std::size_t>(j)].R.col(2);
    const Vec3 p = prefix[static_cast<std::size_t>(j)].p;
    J.col(j).head<3>() = z.cross(p_ee - p);
    J.col(j).tail<3>() = z;
  }
  return J;
}

Eigen::MatrixXd damped_pseudoinverse(const Eigen::Matrix<double, 6, Eigen::Dynamic>& J,
                                     double damping) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd inv_s = svd.singularValues();
  for (int i = 0; i < inv_s.size(); ++i) {
    const double s = inv_s[i];
    inv_s[i] = s < 1e-8 ? 0.0 : s / (s * s + damping * damping);
  }
  return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
}

std::array<Transform, 2> object_to_ee_targets(const Transform& T_o, const DualArmSystem& system) {
  return {T_o * system.grasp[0], T_o * system.grasp[1]};
}

Vec6 closed_chain_deviation(const DualArmSystem& system, const JointVector& q) {
  const Transform T1 = forward_kinematics(system.arms[0], system.arm_segment(q, 0)).ee;
  const Transform T2 = forward_kinematics(system.arms[1], system.arm_segment(q, 1)).ee;
  // Constant offset: end-effector 2 expressed in the end-effector-1 frame.
  const Transform rel = system.grasp[0].inverse() * system.grasp[1];
  return transform_to_deviation(T2.inverse() * T1 * rel);
}

ChainTolerance chain_tolerance(const DualArmSystem& system, const IKParams& params) {
  const double lever = (system.grasp[0].p - system.grasp[1].p).norm();
  return {2.0 * params.eps_p + lever * params.eps_o + 1e-12, 2.0 * params.eps_o + 1e-9};
}

std::optional<Eigen::VectorXd> ik_single(const ManipulatorModel& model,
                                         const Eigen::VectorXd& q_seed, const Vec3& p_g,
                                         const Mat3& R_g, const IKParams& params,
                                         long long* iters) {
  Eigen::VectorXd q = q_seed;
  for (int k = 0; k <= params.max_iters; ++k) {
    const FKResult fk = forward_kinematics(model, q);
    const Vec3 e_p = p_g - fk.ee.p;
    const Vec3 e_o = R_g * rotation_to_expcoords(fk.ee.R.transpose() * R_g);
    if (e_p.norm() < params.eps_p && e_o.norm() < params.eps_o) {
      return q;
    }
    if (k == params.max_iters) {
      break;
    }
    Vec6 err;
    err << e_p, e_o;
    const Eigen::VectorXd dq =
        damped_pseudoinverse(jacobian(model, q), params.damping) * (params.gain.asDiagonal() * err);
    if (iters != nullptr) {
      ++*iters;
    }
    Eigen::VectorXd q_next = q + params.step * dq;
    clamp_to_limits(model, q_next);
    if ((q_next - q).lpNorm<Eigen::Infinity>() < 1e-14) {
      break;  // pinned against limits or a dead singular direction
    }
    q = q_next;
  }
  return std::nullopt;
}

std::optional<JointVector> ik_dual(const DualArmSystem& system, const JointVector& q_seed,
                                   const Transform& T_o, const IKParams& params, int* failed_arm,
                                   long long* iters) {
  const std::array<Transform, 2> targets = object_to_ee_targets(T_o, system);
  std::array<Eigen::VectorXd, 2> solved;
  for (int i = 0; i < 2; ++i) {
    auto qi = ik_single(system.arms[static_cast<std::size_t>(i)], system.arm_segment(q_seed, i),
                        targets[static_cast<std::size_t>(i)].p,
                        targets[static_cast<std::size_t>(i)].R, params, iters);
    if (!qi) {
      if (failed_arm != nullptr) {
        *failed_arm = i;
      }
      return std::nullopt;
    }
    solved[static_cast<std::size_t>(i)] = std::move(*qi);
  }
  return system.join(solved[0], solved[1]);
}

}  // namespace tcbirrt
