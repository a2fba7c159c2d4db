#include "tcbirrt/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace tcbirrt {

std::vector<SuccessRatePoint> success_rate_curve(const std::vector<TrialRecord>& records,
                                                 const std::vector<double>& grid) {
  std::vector<SuccessRatePoint> curve;
  curve.reserve(grid.size());
  const double n = static_cast<double>(records.size());
  for (double t : grid) {
    int count = 0;
    for (const TrialRecord& r : records) {
      if (r.success && r.time_s <= t) {
        ++count;
      }
    }
    curve.push_back({t, n > 0 ? count / n : 0.0});
  }
  return curve;
}

std::vector<double> log_time_grid(double t_min, double t_max, int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points <= 1 || t_max <= t_min) {
    grid.push_back(t_max);
    return grid;
  }
  const double log_lo = std::log(t_min);
  const double log_hi = std::log(t_max);
  for (int i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    grid.push_back(i == points - 1 ? t_max : std::exp(log_lo + s * (log_hi - log_lo)));
  }
  return grid;
}

std::optional<TimeStats> trimmed_time_stats(const std::vector<TrialRecord>& records, int n_min) {
  std::vector<double> times;
  for (const TrialRecord& r : records) {
    if (r.success) {
      times.push_back(r.time_s);
    }
  }
  if (static_cast<int>(times.size()) < n_min || n_min <= 0) {
    return std::nullopt;
  }
  std::sort(times.begin(), times.end());
  times.resize(static_cast<std::size_t>(n_min));
  double sum = 0.0;
  for (double t : times) {
    sum += t;
  }
  const double mean = sum / n_min;
  double sq = 0.0;
  for (double t : times) {
    sq += (t - mean) * (t - mean);
  }
  TimeStats stats;
  stats.mean = mean;
  stats.stddev = n_min > 1 ? std::sqrt(sq / (n_min - 1)) : 0.0;
  stats.n_used = n_min;
  return stats;
}

MetricsReport make_report(const std::vector<TrialRecord>& records, double timeout, int n_t_min) {
  MetricsReport report;
  report.curve = success_rate_curve(records, log_time_grid(0.1, std::max(timeout, 0.1), 100));
  report.time_stats = trimmed_time_stats(records, n_t_min);
  report.n_t_min = n_t_min;
  report.total = static_cast<int>(records.size());
  for (const TrialRecord& r : records) {
    report.successes += r.success ? 1 : 0;
  }
  return report;
}

}  // namespace tcbirrt
