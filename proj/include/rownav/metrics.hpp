#pragma once

#include <vector>

#include "rownav/episode.hpp"
#include "rownav/geometry.hpp"

namespace rownav {

struct EpisodeMetrics {
  double clearance_time = 0.0;  // s; meaningful only when completed
  double mae = 0.0;             // m, mean lateral distance to the ground truth
  double mse = 0.0;             // m^2
  double heading_avg = 0.0;     // rad, mean |heading error| vs the local tangent
  double v_avg = 0.0;           // m/s, mean smoothed linear command
  double omega_stddev = 0.0;    // rad/s, population stddev of smoothed angular commands
  bool completed = false;
  int stop_events = 0;
};

/// Unsigned distance from each trajectory point to the nearest point of the
/// ground-truth line.
std::vector<double> lateral_errors(const std::vector<TrajectorySample>& trajectory,
                                   const Polyline& centerline);

/// Benchmark metric set for one episode. Failed episodes still get
/// MAE/MSE over the traversed portion; completed stays false.
EpisodeMetrics compute_metrics(const EpisodeResult& episode, const Polyline& centerline);

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev; 0 for a single run
};

/// Per-variant, per-world aggregate over seeded repetitions. Clearance time
/// averages completed runs only; the error metrics include every run.
struct RunSummary {
  int runs = 0;
  int completed_runs = 0;
  MetricStat clearance_time;
  MetricStat mae;
  MetricStat mse;
  MetricStat heading_avg;
  MetricStat v_avg;
  MetricStat omega_stddev;
  int stop_events_total = 0;
};

RunSummary aggregate(const std::vector<EpisodeMetrics>& runs);

}  // namespace rownav
