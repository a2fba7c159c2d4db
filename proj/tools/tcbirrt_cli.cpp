#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "tcbirrt/bench.hpp"

namespace fs = std::filesystem;
using namespace tcbirrt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPlanningFailure = 2;

Pose6 parse_pose_csv(const std::string& csv) {
  Vec6 v;
  std::istringstream in(csv);
  std::string field;
  for (int i = 0; i < 6; ++i) {
    if (!std::getline(in, field, ',')) {
      throw CLI::ValidationError("pose", "expected 6 comma-separated numbers, got '" + csv + "'");
    }
    v[i] = std::stod(field);
  }
  if (std::getline(in, field, ',')) {
    throw CLI::ValidationError("pose", "expected exactly 6 numbers, got more in '" + csv + "'");
  }
  return Pose6::FromVec(v);
}

int run_plan(const std::string& scene_path, const std::string& start_csv,
             const std::string& goal_csv, std::uint64_t seed, double timeout,
             const std::string& out_dir) {
  const SceneConfig scene = load_scene(scene_path);
  const Pose6 start = parse_pose_csv(start_csv);
  const Pose6 goal = parse_pose_csv(goal_csv);

  const auto q_start =
      ik_dual(scene.system, scene.nominal_q, pose_to_transform(start), scene.ik);
  if (!q_start) {
    std::cerr << "no inverse kinematics solution for the start pose\n";
    return kExitPlanningFailure;
  }
  const auto q_goal = ik_dual(scene.system, scene.nominal_q, pose_to_transform(goal), scene.ik);
  if (!q_goal) {
    std::cerr << "no inverse kinematics solution for the goal pose\n";
    return kExitPlanningFailure;
  }

  const WorldModel world = scene.world();
  PlannerParams params = scene.planner;
  params.timeout = timeout;
  params.seed = seed;
  Planner planner(world, scene.ik, params);
  const PlanOutcome outcome = planner.plan(*q_start, start, *q_goal, goal);

  std::cout << "planning time " << outcome.stats.planning_time << " s (wall "
            << outcome.stats.wall_time << " s), " << outcome.stats.iterations << " iterations, "
            << "trees " << outcome.stats.tree_a_size << "/" << outcome.stats.tree_b_size << "\n";
  if (!outcome.success()) {
    std::cerr << "planning failed: " << outcome.diagnostic << "\n";
    return kExitPlanningFailure;
  }
  std::cout << "path: " << outcome.result->segments.size() << " segments, length "
            << joint_path_length(*outcome.result) << " rad, regrasp "
            << (outcome.stats.regrasp_occurred ? "yes" : "no") << "\n";
  fs::create_directories(out_dir);
  const std::string path_file = (fs::path(out_dir) / "path_plan.json").string();
  write_path_file(path_file, *outcome.result, file_hash(scene_path), seed);
  std::cout << "wrote " << path_file << "\n";
  return kExitOk;
}

int run_bench(const std::string& scene_path, int tasks_count, std::uint64_t seed, double timeout,
              const std::string& out_dir) {
  SceneConfig scene = load_scene(scene_path);
  scene.seed = seed;
  scene.planner.seed = seed;
  const std::string scene_hash = file_hash(scene_path);
  fs::create_directories(out_dir);

  Rng rng(seed);
  const auto tasks = generate_tasks(scene, tasks_count, rng);
  int total_resamples = 0;
  for (const auto& t : tasks) {
    total_resamples += t.resamples;
  }
  std::cout << "generated " << tasks.size() << " tasks (" << total_resamples << " resamples)\n";

  // trials.csv grows one flushed row per finished task.
  std::ofstream trials((fs::path(out_dir) / "trials.csv").string());
  trials << kTrialsCsvHeader << "\n";
  trials.flush();
  const TrialSink sink = [&](const TrialRecord& record, const PlanOutcome& outcome,
                             const TaskInstance& task) {
    trials << trial_to_csv_row(record) << "\n";
    trials.flush();
    if (outcome.success()) {
      const std::string name = "path_" + std::to_string(task.id) + ".json";
      write_path_file((fs::path(out_dir) / name).string(), *outcome.result, scene_hash,
                      seed ^ static_cast<std::uint64_t>(task.id));
    }
    std::cout << "task " << record.task_id << ": " << (record.success ? "ok" : "fail") << " ("
              << record.time_s << " s)\n";
  };
  const BenchRun run = run_benchmark(scene, tasks, timeout, sink);
  trials.close();

  const MetricsReport report = make_report(run.records, timeout, scene.n_t_min);
  write_curve_csv(report.curve, (fs::path(out_dir) / "curve.csv").string());

  std::cout << "success " << report.successes << "/" << report.total << "\n";
  if (report.time_stats) {
    std::cout << "mean of " << report.time_stats->n_used
              << " fastest successes: " << report.time_stats->mean << " s (sd "
              << report.time_stats->stddev << ")\n";
  } else {
    std::cout << "fewer than " << report.n_t_min
              << " successes; trimmed time statistics not reported\n";
  }
  return kExitOk;
}

int run_validate(const std::string& path_file, const std::string& scene_path) {
  const SceneConfig scene = load_scene(scene_path);
  const PathFile file = read_path_file(path_file);
  const auto issues = validate_path(scene, file);
  if (issues.empty()) {
    std::cout << "valid: " << file.segments.size() << " segments\n";
    return kExitOk;
  }
  for (const auto& issue : issues) {
    std::cerr << "segment " << issue.segment << " state " << issue.state << ": " << issue.what
              << "\n";
  }
  return kExitPlanningFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"task-space bidirectional planning for a dual-arm closed chain"};
  app.require_subcommand(1);

  std::string scene_path, start_csv, goal_csv, out_dir = "out", path_file;
  std::uint64_t seed = 0;
  double timeout = 60.0;
  int tasks_count = 10;

  CLI::App* plan = app.add_subcommand("plan", "plan one motion between two object poses");
  plan->add_option("--scene", scene_path, "scene file")->required();
  plan->add_option("--start-pose", start_csv, "start pose, 6 csv values (x,y,z,roll,pitch,yaw)")
      ->required();
  plan->add_option("--goal-pose", goal_csv, "goal pose, 6 csv values")->required();
  plan->add_option("--seed", seed, "rng seed");
  plan->add_option("--timeout", timeout, "planning budget in seconds");
  plan->add_option("--out", out_dir, "output directory");

  CLI::App* bench = app.add_subcommand("bench", "run a randomized benchmark on a scene");
  bench->add_option("--scene", scene_path, "scene file")->required();
  bench->add_option("--tasks", tasks_count, "number of tasks")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "rng seed");
  bench->add_option("--timeout", timeout, "per-task planning budget in seconds");
  bench->add_option("--out", out_dir, "output directory");

  CLI::App* validate = app.add_subcommand("validate", "replay a path file against a scene");
  validate->add_option("--path", path_file, "path file")->required();
  validate->add_option("--scene", scene_path, "scene file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (plan->parsed()) {
      return run_plan(scene_path, start_csv, goal_csv, seed, timeout, out_dir);
    }
    if (bench->parsed()) {
      return run_bench(scene_path, tasks_count, seed, timeout, out_dir);
    }
    return run_validate(path_file, scene_path);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const GenerationExhausted& e) {
    std::cerr << e.what() << "\n";
    return kExitPlanningFailure;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
}
