#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcbirrt/bench.hpp"

namespace py = pybind11;
using namespace tcbirrt;

namespace {

py::dict segment_to_dict(const PathSegment& seg) {
  py::dict d;
  d["kind"] = seg.kind == PathSegment::Kind::Transport ? "transport" : "regrasp";
  py::list joints;
  for (const JointVector& q : seg.joints) {
    joints.append(Eigen::VectorXd(q));
  }
  d["joints"] = joints;
  py::list poses;
  for (const Pose6& pose : seg.object_poses) {
    poses.append(Vec6(pose.vec()));
  }
  d["object_poses"] = poses;
  return d;
}

py::dict outcome_to_dict(const PlanOutcome& outcome) {
  py::dict d;
  d["success"] = outcome.success();
  d["diagnostic"] = outcome.diagnostic;
  d["planning_time"] = outcome.stats.planning_time;
  d["wall_time"] = outcome.stats.wall_time;
  d["iterations"] = outcome.stats.iterations;
  d["regrasp"] = outcome.stats.regrasp_occurred;
  py::list segments;
  if (outcome.success()) {
    for (const PathSegment& seg : outcome.result->segments) {
      segments.append(segment_to_dict(seg));
    }
    d["path_length"] = joint_path_length(*outcome.result);
  }
  d["segments"] = segments;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tcbirrt, m) {
  m.doc() = "task-space bidirectional planning for a dual-arm closed chain";

  py::class_<Transform>(m, "Transform")
      .def(py::init<>())
      .def(py::init([](const Mat3& R, const Vec3& p) { return Transform{R, p}; }), py::arg("R"),
           py::arg("p"))
      .def_readwrite("R", &Transform::R)
      .def_readwrite("p", &Transform::p)
      .def("inverse", &Transform::inverse)
      .def("matrix", &Transform::matrix)
      .def("__mul__",
           [](const Transform& a, const Transform& b) { return a * b; })
      .def("apply", [](const Transform& t, const Vec3& x) { return t * x; });

  py::class_<Pose6>(m, "Pose6")
      .def(py::init<>())
      .def(py::init([](const Vec6& v) { return Pose6::FromVec(v); }), py::arg("vec"))
      .def_readwrite("p", &Pose6::p)
      .def_readwrite("u", &Pose6::u)
      .def("vec", &Pose6::vec);

  m.def("pose_to_transform", &pose_to_transform);
  m.def("transform_to_pose", &transform_to_pose);
  m.def("transform_to_deviation", &transform_to_deviation);
  m.def("rotation_to_expcoords", &rotation_to_expcoords);
  m.def("expcoords_to_rotation", &expcoords_to_rotation);
  m.def("rot_x", &rot_x);
  m.def("rot_y", &rot_y);
  m.def("rot_z", &rot_z);

  py::class_<SceneConfig>(m, "SceneConfig")
      .def_property_readonly("dof", [](const SceneConfig& s) { return s.system.dof(); })
      .def_property_readonly("nominal_q", [](const SceneConfig& s) { return s.nominal_q; })
      .def_property_readonly("nominal_start",
                             [](const SceneConfig& s) { return s.nominal_start; })
      .def_property_readonly("nominal_goal", [](const SceneConfig& s) { return s.nominal_goal; })
      .def_property_readonly("obstacle_count",
                             [](const SceneConfig& s) { return s.obstacles.size(); })
      .def_property_readonly("seed", [](const SceneConfig& s) { return s.seed; });

  m.def("load_scene", &load_scene, py::arg("path"));

  m.def(
      "forward_kinematics",
      [](const SceneConfig& scene, int arm, const Eigen::VectorXd& q) {
        const FKResult fk =
            forward_kinematics(scene.system.arms[static_cast<std::size_t>(arm)], q);
        return fk.ee.matrix();
      },
      py::arg("scene"), py::arg("arm"), py::arg("q"),
      "end-effector transform of one arm as a 4x4 matrix");
  m.def(
      "jacobian",
      [](const SceneConfig& scene, int arm, const Eigen::VectorXd& q) {
        return Eigen::MatrixXd(jacobian(scene.system.arms[static_cast<std::size_t>(arm)], q));
      },
      py::arg("scene"), py::arg("arm"), py::arg("q"));
  m.def(
      "closed_chain_deviation",
      [](const SceneConfig& scene, const JointVector& q) {
        return Vec6(closed_chain_deviation(scene.system, q));
      },
      py::arg("scene"), py::arg("q"));
  m.def(
      "ik_dual",
      [](const SceneConfig& scene, const JointVector& seed, const Pose6& pose)
          -> std::optional<JointVector> {
        return ik_dual(scene.system, seed, pose_to_transform(pose), scene.ik);
      },
      py::arg("scene"), py::arg("seed"), py::arg("pose"),
      "joint solution for an object pose, or None");
  m.def(
      "in_collision",
      [](const SceneConfig& scene, const JointVector& q, const Pose6& pose) {
        const WorldModel world = scene.world();
        return configuration_in_collision(world, q, pose_to_transform(pose));
      },
      py::arg("scene"), py::arg("q"), py::arg("pose"));

  m.def(
      "plan",
      [](const SceneConfig& scene, const Pose6& start, const Pose6& goal, std::uint64_t seed,
         double timeout) {
        const auto q_start =
            ik_dual(scene.system, scene.nominal_q, pose_to_transform(start), scene.ik);
        const auto q_goal =
            ik_dual(scene.system, scene.nominal_q, pose_to_transform(goal), scene.ik);
        py::dict d;
        if (!q_start || !q_goal) {
          d["success"] = false;
          d["diagnostic"] = std::string("no inverse kinematics solution for the ") +
                            (!q_start ? "start" : "goal") + " pose";
          d["segments"] = py::list();
          return d;
        }
        const WorldModel world = scene.world();
        PlannerParams params = scene.planner;
        params.seed = seed;
        params.timeout = timeout;
        Planner planner(world, scene.ik, params);
        return outcome_to_dict(planner.plan(*q_start, start, *q_goal, goal));
      },
      py::arg("scene"), py::arg("start"), py::arg("goal"), py::arg("seed") = 0,
      py::arg("timeout") = 60.0,
      "solve both endpoint configurations from the scene's nominal posture and plan");

  m.def(
      "generate_tasks",
      [](const SceneConfig& scene, int count, std::uint64_t seed) {
        Rng rng(seed);
        py::list out;
        for (const TaskInstance& t : generate_tasks(scene, count, rng)) {
          py::dict d;
          d["id"] = t.id;
          d["start"] = Vec6(t.start.vec());
          d["goal"] = Vec6(t.goal.vec());
          d["q_start"] = t.q_start;
          d["q_goal"] = t.q_goal;
          out.append(d);
        }
        return out;
      },
      py::arg("scene"), py::arg("count"), py::arg("seed"));

  m.def(
      "validate_path_file",
      [](const SceneConfig& scene, const std::string& path) {
        py::list out;
        for (const ValidationIssue& issue : validate_path(scene, read_path_file(path))) {
          out.append(py::make_tuple(issue.segment, issue.state, issue.what));
        }
        return out;
      },
      py::arg("scene"), py::arg("path"), "list of (segment, state, message) issues; empty = valid");

  m.def(
      "success_rate",
      [](const std::vector<std::pair<bool, double>>& trials, double t) {
        std::vector<TrialRecord> records;
        records.reserve(trials.size());
        int id = 0;
        for (const auto& [success, time] : trials) {
          records.push_back({id++, success, time, 0, 0.0, false});
        }
        return success_rate_curve(records, {t})[0].p;
      },
      py::arg("trials"), py::arg("t"),
      "fraction of (success, time) pairs succeeding within t");
}
