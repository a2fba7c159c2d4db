#pragma once

#include <optional>
#include <vector>

namespace tcbirrt {

struct TrialRecord {
  int task_id = 0;
  bool success = false;
  double time_s = 0.0;  // planning-clock seconds; equals the timeout on failure
  long long iterations = 0;
  double path_len_rad = 0.0;
  bool regrasp = false;
};

struct SuccessRatePoint {
  double t = 0.0;
  double p = 0.0;
};

struct TimeStats {
  double mean = 0.0;
  double stddev = 0.0;
  int n_used = 0;
};

/// Fraction of trials that succeeded within each grid time; monotone in t.
std::vector<SuccessRatePoint> success_rate_curve(const std::vector<TrialRecord>& records,
                                                 const std::vector<double>& grid);

/// Logarithmic grid from t_min to t_max, inclusive.
std::vector<double> log_time_grid(double t_min, double t_max, int points);

/// Mean and Bessel-corrected standard deviation of the n_min smallest
/// successful planning times. Returns nullopt when there are fewer than
/// n_min successes.
std::optional<TimeStats> trimmed_time_stats(const std::vector<TrialRecord>& records, int n_min);

struct MetricsReport {
  std::vector<SuccessRatePoint> curve;
  std::optional<TimeStats> time_stats;
  int n_t_min = 0;
  int successes = 0;
  int total = 0;
};

MetricsReport make_report(const std::vector<TrialRecord>& records, double timeout, int n_t_min);

}  // namespace tcbirrt
