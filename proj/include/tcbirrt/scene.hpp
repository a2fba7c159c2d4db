#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "tcbirrt/planner.hpp"

namespace tcbirrt {

/// Malformed JSON; the message carries the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed JSON with an invalid or missing field; the message names the
/// field path.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TaskGenParams {
  double pos_range = 0.2;  // m, per component
  double rot_range = 0.5;  // rad, per component
};

struct SceneConfig {
  DualArmSystem system;
  RobotGeometry robot_geometry;
  std::vector<Shape> obstacles;
  std::vector<std::pair<LinkRef, LinkRef>> self_collision_pairs;
  Pose6 nominal_start;
  Pose6 nominal_goal;
  JointVector nominal_q;
  PlannerParams planner;
  IKParams ik;
  TaskGenParams task_gen;
  std::uint64_t seed = 0;
  int n_t_min = 40;

  WorldModel world() const;
};

SceneConfig load_scene(const std::string& path);
SceneConfig scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneConfig& scene);
void save_scene(const SceneConfig& scene, const std::string& path);

struct TaskInstance {
  int id = 0;
  Pose6 start;
  Pose6 goal;
  JointVector q_start;
  JointVector q_goal;
  Vec6 start_perturbation = Vec6::Zero();  // [p_e; e_u]
  Vec6 goal_perturbation = Vec6::Zero();
  int resamples = 0;
};

/// No valid draw within 100 * count resamples; the nominal poses are likely
/// infeasible.
struct GenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Perturbs the nominal poses uniformly and solves both endpoint
/// configurations, resampling draws whose IK fails, whose constraint
/// deviation is out of tolerance, or which collide.
std::vector<TaskInstance> generate_tasks(const SceneConfig& scene, int count, Rng& rng);

}  // namespace tcbirrt
