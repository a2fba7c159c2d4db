#include "tcbirrt/bench.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace tcbirrt {

double joint_path_length(const PlanResult& result) {
  double length = 0.0;
  const JointVector* prev = nullptr;
  for (const PathSegment& seg : result.segments) {
    for (const JointVector& q : seg.joints) {
      if (prev != nullptr) {
        length += (q - *prev).norm();
      }
      prev = &q;
    }
  }
  return length;
}

BenchRun run_benchmark(const SceneConfig& scene, const std::vector<TaskInstance>& tasks,
                       double timeout, const TrialSink& sink) {
  BenchRun run;
  run.records.reserve(tasks.size());
  run.outcomes.reserve(tasks.size());
  const WorldModel world = scene.world();
  for (const TaskInstance& task : tasks) {
    PlannerParams params = scene.planner;
    params.timeout = timeout;
    params.seed = scene.seed ^ static_cast<std::uint64_t>(task.id);
    Planner planner(world, scene.ik, params);
    PlanOutcome outcome = planner.plan(task.q_start, task.start, task.q_goal, task.goal);

    TrialRecord record;
    record.task_id = task.id;
    record.success = outcome.success();
    record.time_s = record.success ? outcome.stats.planning_time : timeout;
    record.iterations = outcome.stats.iterations;
    record.path_len_rad = record.success ? joint_path_length(*outcome.result) : 0.0;
    record.regrasp = outcome.stats.regrasp_occurred;
    if (sink) {
      sink(record, outcome, task);
    }
    run.records.push_back(record);
    run.outcomes.push_back(std::move(outcome));
  }
  return run;
}

const char* const kTrialsCsvHeader = "task_id,success,time_s,iterations,path_len_rad,regrasp";

std::string trial_to_csv_row(const TrialRecord& r) {
  std::ostringstream row;
  row.precision(17);
  row << r.task_id << ',' << (r.success ? 1 : 0) << ',' << r.time_s << ',' << r.iterations << ','
      << r.path_len_rad << ',' << (r.regrasp ? 1 : 0);
  return row.str();
}

void write_trials_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << kTrialsCsvHeader << "\n";
  for (const TrialRecord& r : records) {
    out << trial_to_csv_row(r) << "\n";
  }
}

void write_curve_csv(const std::vector<SuccessRatePoint>& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out.precision(17);
  out << "t,p\n";
  for (const SuccessRatePoint& point : curve) {
    out << point.t << ',' << point.p << "\n";
  }
}

void export_results(const BenchRun& run, const MetricsReport& report,
                    const std::string& scene_hash, std::uint64_t seed,
                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_trials_csv(run.records, (fs::path(out_dir) / "trials.csv").string());
  write_curve_csv(report.curve, (fs::path(out_dir) / "curve.csv").string());
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    if (!run.records[i].success) {
      continue;
    }
    const std::string name = "path_" + std::to_string(run.records[i].task_id) + ".json";
    write_path_file((fs::path(out_dir) / name).string(), *run.outcomes[i].result, scene_hash,
                    seed ^ static_cast<std::uint64_t>(run.records[i].task_id));
  }
}

}  // namespace tcbirrt
