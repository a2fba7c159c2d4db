#include "tcbirrt/scene.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tcbirrt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ValidationError(path + ": " + why);
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(path + "." + key, "missing required field");
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  return j.get<double>();
}

double number_field(const json& j, const std::string& path, const char* key) {
  return as_number(require(j, path, key), path + "." + key);
}

Eigen::VectorXd as_vector(const json& j, const std::string& path, int size) {
  if (!j.is_array() || (size >= 0 && static_cast<int>(j.size()) != size)) {
    fail(path, "expected an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Vec3 as_vec3(const json& j, const std::string& path) { return as_vector(j, path, 3); }
Vec6 as_vec6(const json& j, const std::string& path) { return as_vector(j, path, 6); }

Transform as_transform(const json& j, const std::string& path) {
  Transform t;
  t.p = as_vec3(require(j, path, "translation"), path + ".translation");
  const Vec3 rpy = as_vec3(require(j, path, "rpy"), path + ".rpy");
  t.R = pose_to_transform({Vec3::Zero(), rpy}).R;
  return t;
}

json transform_to_json(const Transform& t) {
  const Pose6 pose = transform_to_pose(t);
  return json{{"translation", {t.p.x(), t.p.y(), t.p.z()}},
              {"rpy", {pose.u.x(), pose.u.y(), pose.u.z()}}};
}

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

ManipulatorModel arm_from_json(const json& j, const std::string& path,
                               std::vector<double>& link_radii) {
  ManipulatorModel arm;
  arm.base = as_transform(require(j, path, "base"), path + ".base");
  const json& dh = require(j, path, "dh");
  if (!dh.is_array() || dh.empty()) {
    fail(path + ".dh", "expected a non-empty array of [theta_offset, alpha, d, a] rows");
  }
  for (std::size_t r = 0; r < dh.size(); ++r) {
    const std::string row_path = path + ".dh[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = as_vector(dh[r], row_path, 4);
    for (int c = 0; c < 4; ++c) {
      if (!std::isfinite(row[c])) {
        fail(row_path, "non-finite value");
      }
    }
    arm.dh.push_back({row[0], row[1], row[2], row[3]});
  }
  const json& limits = require(j, path, "joint_limits");
  if (!limits.is_array() || limits.size() != dh.size()) {
    fail(path + ".joint_limits", "expected one [lo, hi] pair per dh row");
  }
  for (std::size_t r = 0; r < limits.size(); ++r) {
    const std::string lim_path = path + ".joint_limits[" + std::to_string(r) + "]";
    const Eigen::VectorXd pair = as_vector(limits[r], lim_path, 2);
    if (!(pair[0] < pair[1])) {
      fail(lim_path, "joint " + std::to_string(r) + " has lo >= hi");
    }
    arm.joint_limits.push_back({pair[0], pair[1]});
  }
  const json& radii = require(j, path, "link_radii");
  if (!radii.is_array() || radii.size() != dh.size()) {
    fail(path + ".link_radii", "expected one radius per dh row");
  }
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const std::string rad_path = path + ".link_radii[" + std::to_string(r) + "]";
    const double radius = as_number(radii[r], rad_path);
    if (radius <= 0.0) {
      fail(rad_path, "radius must be positive");
    }
    link_radii.push_back(radius);
  }
  return arm;
}

Shape obstacle_from_json(const json& j, const std::string& path) {
  const json& type = require(j, path, "type");
  if (type == "box") {
    const Vec3 he = as_vec3(require(j, path, "half_extents"), path + ".half_extents");
    if ((he.array() <= 0.0).any()) {
      fail(path + ".half_extents", "half extents must be positive");
    }
    return BoxShape{he, as_transform(require(j, path, "pose"), path + ".pose")};
  }
  if (type == "sphere") {
    const double radius = number_field(j, path, "radius");
    if (radius <= 0.0) {
      fail(path + ".radius", "radius must be positive");
    }
    return SphereShape{radius, as_vec3(require(j, path, "center"), path + ".center")};
  }
  if (type == "capsule") {
    const double radius = number_field(j, path, "radius");
    if (radius <= 0.0) {
      fail(path + ".radius", "radius must be positive");
    }
    return CapsuleShape{radius, as_vec3(require(j, path, "p0"), path + ".p0"),
                        as_vec3(require(j, path, "p1"), path + ".p1")};
  }
  fail(path + ".type", "unknown shape type '" + type.get<std::string>() + "'");
}

json obstacle_to_json(const Shape& s) {
  if (const auto* box = std::get_if<BoxShape>(&s)) {
    return json{{"type", "box"},
                {"half_extents", {box->half_extents.x(), box->half_extents.y(), box->half_extents.z()}},
                {"pose", transform_to_json(box->pose)}};
  }
  if (const auto* sphere = std::get_if<SphereShape>(&s)) {
    return json{{"type", "sphere"},
                {"radius", sphere->radius},
                {"center", {sphere->center.x(), sphere->center.y(), sphere->center.z()}}};
  }
  const auto& capsule = std::get<CapsuleShape>(s);
  return json{{"type", "capsule"},
              {"radius", capsule.radius},
              {"p0", {capsule.p0.x(), capsule.p0.y(), capsule.p0.z()}},
              {"p1", {capsule.p1.x(), capsule.p1.y(), capsule.p1.z()}}};
}

}  // namespace

WorldModel SceneConfig::world() const {
  WorldModel w;
  w.obstacles = obstacles;
  w.robot = robot_geometry;
  w.system = system;
  w.self_collision_pairs = self_collision_pairs;
  return w;
}

SceneConfig scene_from_json(const json& j) {
  SceneConfig scene;
  const std::string root = "scene";

  const json& robot = require(j, root, "robot");
  const json& arms = require(robot, root + ".robot", "arms");
  if (!arms.is_array() || arms.size() != 2) {
    fail(root + ".robot.arms", "expected exactly 2 arms");
  }
  for (int i = 0; i < 2; ++i) {
    scene.system.arms[static_cast<std::size_t>(i)] =
        arm_from_json(arms[static_cast<std::size_t>(i)],
                      root + ".robot.arms[" + std::to_string(i) + "]",
                      scene.robot_geometry.link_radii[static_cast<std::size_t>(i)]);
  }
  const json& grasps = require(robot, root + ".robot", "grasps");
  if (!grasps.is_array() || grasps.size() != 2) {
    fail(root + ".robot.grasps", "expected exactly 2 grasp transforms");
  }
  for (int i = 0; i < 2; ++i) {
    scene.system.grasp[static_cast<std::size_t>(i)] = as_transform(
        grasps[static_cast<std::size_t>(i)], root + ".robot.grasps[" + std::to_string(i) + "]");
  }
  scene.nominal_q =
      as_vector(require(robot, root + ".robot", "nominal_q"), root + ".robot.nominal_q",
                scene.system.dof());

  const json& object = require(j, root, "object");
  scene.robot_geometry.object_half_extents =
      as_vec3(require(object, root + ".object", "half_extents"), root + ".object.half_extents");
  if ((scene.robot_geometry.object_half_extents.array() <= 0.0).any()) {
    fail(root + ".object.half_extents", "half extents must be positive");
  }

  if (j.contains("obstacles")) {
    const json& obstacles = j.at("obstacles");
    if (!obstacles.is_array()) {
      fail(root + ".obstacles", "expected an array");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      scene.obstacles.push_back(
          obstacle_from_json(obstacles[i], root + ".obstacles[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("self_collision_pairs")) {
    const json& pairs = j.at("self_collision_pairs");
    const std::string path = root + ".self_collision_pairs";
    if (pairs.is_string() && pairs == "inter_arm") {
      scene.self_collision_pairs = default_self_collision_pairs(scene.system);
    } else if (pairs.is_array()) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string pair_path = path + "[" + std::to_string(i) + "]";
        const json& p = pairs[i];
        if (!p.is_array() || p.size() != 2) {
          fail(pair_path, "expected [[arm, link], [arm, link]]");
        }
        const Eigen::VectorXd a = as_vector(p[0], pair_path + "[0]", 2);
        const Eigen::VectorXd b = as_vector(p[1], pair_path + "[1]", 2);
        const LinkRef lhs{static_cast<int>(a[0]), static_cast<int>(a[1])};
        const LinkRef rhs{static_cast<int>(b[0]), static_cast<int>(b[1])};
        for (const LinkRef& ref : {lhs, rhs}) {
          if (ref.arm < 0 || ref.arm > 1 || ref.link < 0 ||
              ref.link >= scene.system.arms[static_cast<std::size_t>(ref.arm)].dof()) {
            fail(pair_path, "link reference out of range");
          }
        }
        if (lhs.arm == rhs.arm && std::abs(lhs.link - rhs.link) <= 1) {
          fail(pair_path, "adjacent links of one arm cannot be a self-collision pair");
        }
        scene.self_collision_pairs.push_back({lhs, rhs});
      }
    } else {
      fail(path, "expected \"inter_arm\" or an array of pairs");
    }
  } else {
    scene.self_collision_pairs = default_self_collision_pairs(scene.system);
  }

  const json& nominal = require(j, root, "nominal_poses");
  scene.nominal_start =
      Pose6::FromVec(as_vec6(require(nominal, root + ".nominal_poses", "start"),
                             root + ".nominal_poses.start"));
  scene.nominal_goal = Pose6::FromVec(
      as_vec6(require(nominal, root + ".nominal_poses", "goal"), root + ".nominal_poses.goal"));

  if (j.contains("planner")) {
    const json& p = j.at("planner");
    const std::string path = root + ".planner";
    PlannerParams& params = scene.planner;
    if (p.contains("step_xi")) params.step_xi = number_field(p, path, "step_xi");
    if (p.contains("bounds_lo")) params.bounds_lo = as_vec6(p.at("bounds_lo"), path + ".bounds_lo");
    if (p.contains("bounds_hi")) params.bounds_hi = as_vec6(p.at("bounds_hi"), path + ".bounds_hi");
    if (p.contains("interp")) params.interp = static_cast<int>(number_field(p, path, "interp"));
    if (p.contains("timeout")) params.timeout = number_field(p, path, "timeout");
    if (p.contains("regrasp_budget")) params.regrasp_budget = number_field(p, path, "regrasp_budget");
    if (p.contains("equality_tol")) params.equality_tol = number_field(p, path, "equality_tol");
    if (p.contains("nn_weights")) params.nn_weights = as_vec6(p.at("nn_weights"), path + ".nn_weights");
    if (p.contains("joint_continuity"))
      params.joint_continuity = number_field(p, path, "joint_continuity");
    if (p.contains("regrasp_edge_step"))
      params.regrasp_edge_step = number_field(p, path, "regrasp_edge_step");
    if (p.contains("collision_step")) params.collision_step = number_field(p, path, "collision_step");
    if (p.contains("freeze_tol")) params.freeze_tol = number_field(p, path, "freeze_tol");
    if ((params.bounds_lo.array() >= params.bounds_hi.array()).any()) {
      fail(path + ".bounds_lo", "lower bounds must be componentwise below upper bounds");
    }
    if (params.interp < 1) {
      fail(path + ".interp", "need at least one interpolation point");
    }
    if (params.step_xi <= 0.0) {
      fail(path + ".step_xi", "step must be positive");
    }
  }

  if (j.contains("ik")) {
    const json& p = j.at("ik");
    const std::string path = root + ".ik";
    IKParams& ik = scene.ik;
    if (p.contains("gain")) ik.gain = as_vec6(p.at("gain"), path + ".gain");
    if (p.contains("step")) ik.step = number_field(p, path, "step");
    if (p.contains("max_iters")) ik.max_iters = static_cast<int>(number_field(p, path, "max_iters"));
    if (p.contains("eps_p")) ik.eps_p = number_field(p, path, "eps_p");
    if (p.contains("eps_o")) ik.eps_o = number_field(p, path, "eps_o");
    if (p.contains("damping")) ik.damping = number_field(p, path, "damping");
    if (ik.eps_p <= 0.0 || ik.eps_o <= 0.0) {
      fail(path, "eps_p and eps_o must be positive");
    }
    if (ik.max_iters < 1) {
      fail(path + ".max_iters", "need at least one iteration");
    }
  }

  if (j.contains("task_gen")) {
    const json& p = j.at("task_gen");
    const std::string path = root + ".task_gen";
    if (p.contains("pos_range")) scene.task_gen.pos_range = number_field(p, path, "pos_range");
    if (p.contains("rot_range")) scene.task_gen.rot_range = number_field(p, path, "rot_range");
    if (scene.task_gen.pos_range < 0.0 || scene.task_gen.rot_range < 0.0) {
      fail(path, "perturbation ranges must be non-negative");
    }
  }

  if (j.contains("seed")) {
    scene.seed = j.at("seed").get<std::uint64_t>();
  }
  scene.planner.seed = scene.seed;
  if (j.contains("n_t_min")) {
    scene.n_t_min = static_cast<int>(number_field(j, root, "n_t_min"));
    if (scene.n_t_min < 1) {
      fail(root + ".n_t_min", "must be at least 1");
    }
  }
  return scene;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
      line += text[i] == '\n' ? 1 : 0;
    }
    throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  return scene_from_json(j);
}

nlohmann::json scene_to_json(const SceneConfig& scene) {
  json arms = json::array();
  for (int i = 0; i < 2; ++i) {
    const ManipulatorModel& arm = scene.system.arms[static_cast<std::size_t>(i)];
    json dh = json::array();
    for (const DHRow& row : arm.dh) {
      dh.push_back({row.theta_offset, row.alpha, row.d, row.a});
    }
    json limits = json::array();
    for (const auto& lim : arm.joint_limits) {
      limits.push_back({lim[0], lim[1]});
    }
    json radii = json::array();
    for (double r : scene.robot_geometry.link_radii[static_cast<std::size_t>(i)]) {
      radii.push_back(r);
    }
    arms.push_back(json{{"base", transform_to_json(arm.base)},
                        {"dh", dh},
                        {"joint_limits", limits},
                        {"link_radii", radii}});
  }
  json obstacles = json::array();
  for (const Shape& s : scene.obstacles) {
    obstacles.push_back(obstacle_to_json(s));
  }
  json pairs = json::array();
  const auto defaults = default_self_collision_pairs(scene.system);
  const bool is_default =
      scene.self_collision_pairs.size() == defaults.size() &&
      std::equal(scene.self_collision_pairs.begin(), scene.self_collision_pairs.end(),
                 defaults.begin(), [](const auto& a, const auto& b) {
                   return a.first.arm == b.first.arm && a.first.link == b.first.link &&
                          a.second.arm == b.second.arm && a.second.link == b.second.link;
                 });
  if (!is_default) {
    for (const auto& [lhs, rhs] : scene.self_collision_pairs) {
      pairs.push_back({{lhs.arm, lhs.link}, {rhs.arm, rhs.link}});
    }
  }

  const PlannerParams& p = scene.planner;
  const IKParams& ik = scene.ik;
  json out{
      {"seed", scene.seed},
      {"n_t_min", scene.n_t_min},
      {"robot",
       {{"arms", arms},
        {"grasps",
         {transform_to_json(scene.system.grasp[0]), transform_to_json(scene.system.grasp[1])}},
        {"nominal_q", vec_to_json(scene.nominal_q)}}},
      {"object",
       {{"half_extents",
         {scene.robot_geometry.object_half_extents.x(),
          scene.robot_geometry.object_half_extents.y(),
          scene.robot_geometry.object_half_extents.z()}}}},
      {"obstacles", obstacles},
      {"nominal_poses",
       {{"start", vec_to_json(scene.nominal_start.vec())},
        {"goal", vec_to_json(scene.nominal_goal.vec())}}},
      {"planner",
       {{"step_xi", p.step_xi},
        {"bounds_lo", vec_to_json(p.bounds_lo)},
        {"bounds_hi", vec_to_json(p.bounds_hi)},
        {"interp", p.interp},
        {"timeout", p.timeout},
        {"regrasp_budget", p.regrasp_budget},
        {"equality_tol", p.equality_tol},
        {"nn_weights", vec_to_json(p.nn_weights)},
        {"joint_continuity", p.joint_continuity},
        {"regrasp_edge_step", p.regrasp_edge_step},
        {"collision_step", p.collision_step},
        {"freeze_tol", p.freeze_tol}}},
      {"ik",
       {{"gain", vec_to_json(ik.gain)},
        {"step", ik.step},
        {"max_iters", ik.max_iters},
        {"eps_p", ik.eps_p},
        {"eps_o", ik.eps_o},
        {"damping", ik.damping}}},
      {"task_gen",
       {{"pos_range", scene.task_gen.pos_range}, {"rot_range", scene.task_gen.rot_range}}}};
  if (is_default) {
    out["self_collision_pairs"] = "inter_arm";
  } else {
    out["self_collision_pairs"] = pairs;
  }
  return out;
}

void save_scene(const SceneConfig& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << scene_to_json(scene).dump(2) << "\n";
}

std::vector<TaskInstance> generate_tasks(const SceneConfig& scene, int count, Rng& rng) {
  const WorldModel world = scene.world();
  std::vector<TaskInstance> tasks;
  tasks.reserve(static_cast<std::size_t>(count));
  const long long budget = 100LL * count;
  long long draws = 0;

  const Transform T_start_nominal = pose_to_transform(scene.nominal_start);
  const Transform T_goal_nominal = pose_to_transform(scene.nominal_goal);

  const auto draw_perturbation = [&] {
    Vec6 e;
    for (int i = 0; i < 3; ++i) {
      e[i] = rng.uniform(-scene.task_gen.pos_range, scene.task_gen.pos_range);
    }
    for (int i = 3; i < 6; ++i) {
      e[i] = rng.uniform(-scene.task_gen.rot_range, scene.task_gen.rot_range);
    }
    return e;
  };

  const ChainTolerance tol = chain_tolerance(scene.system, scene.ik);
  const auto endpoint_valid = [&](const JointVector& q, const Transform& T_o) {
    const Vec6 h = closed_chain_deviation(scene.system, q);
    if (h.head<3>().norm() > tol.pos || h.tail<3>().norm() > tol.ori) {
      return false;
    }
    return !configuration_in_collision(world, q, T_o);
  };

  while (static_cast<int>(tasks.size()) < count) {
    TaskInstance task;
    task.id = static_cast<int>(tasks.size());
    bool valid = false;
    int resamples = 0;
    while (!valid) {
      if (++draws > budget) {
        throw GenerationExhausted("task generation exhausted after " + std::to_string(budget) +
                                  " draws; the nominal poses are likely infeasible");
      }
      task.start_perturbation = draw_perturbation();
      task.goal_perturbation = draw_perturbation();
      const Transform T_start =
          T_start_nominal * pose_to_transform(Pose6::FromVec(task.start_perturbation));
      const Transform T_goal =
          T_goal_nominal * pose_to_transform(Pose6::FromVec(task.goal_perturbation));
      const auto q_start = ik_dual(scene.system, scene.nominal_q, T_start, scene.ik);
      if (!q_start || !endpoint_valid(*q_start, T_start)) {
        ++resamples;
        continue;
      }
      const auto q_goal = ik_dual(scene.system, scene.nominal_q, T_goal, scene.ik);
      if (!q_goal || !endpoint_valid(*q_goal, T_goal)) {
        ++resamples;
        continue;
      }
      task.start = transform_to_pose(T_start);
      task.goal = transform_to_pose(T_goal);
      task.q_start = *q_start;
      task.q_goal = *q_goal;
      task.resamples = resamples;
      valid = true;
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

}  // namespace tcbirrt
