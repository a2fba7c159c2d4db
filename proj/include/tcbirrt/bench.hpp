#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tcbirrt/metrics.hpp"
#include "tcbirrt/path_io.hpp"
#include "tcbirrt/scene.hpp"

namespace tcbirrt {

/// Called after each trial so records can be persisted incrementally.
using TrialSink =
    std::function<void(const TrialRecord&, const PlanOutcome&, const TaskInstance&)>;

struct BenchRun {
  std::vector<TrialRecord> records;
  std::vector<PlanOutcome> outcomes;  // index-aligned with records
};

/// One planner run per task, each with its own planner seeded with
/// scene.seed ^ task id. Per-task failures are recorded, never raised.
BenchRun run_benchmark(const SceneConfig& scene, const std::vector<TaskInstance>& tasks,
                       double timeout, const TrialSink& sink = {});

/// Sum of consecutive joint-space L2 steps across all segments.
double joint_path_length(const PlanResult& result);

extern const char* const kTrialsCsvHeader;

std::string trial_to_csv_row(const TrialRecord& record);

void write_trials_csv(const std::vector<TrialRecord>& records, const std::string& path);
void write_curve_csv(const std::vector<SuccessRatePoint>& curve, const std::string& path);

/// trials.csv, curve.csv, and path_<task_id>.json per successful trial.
void export_results(const BenchRun& run, const MetricsReport& report,
                    const std::string& scene_hash, std::uint64_t seed,
                    const std::string& out_dir);

}  // namespace tcbirrt
