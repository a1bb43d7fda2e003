#include "rownav/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rownav {

std::vector<double> lateral_errors(const std::vector<TrajectorySample>& trajectory,
                                   const Polyline& centerline) {
  if (centerline.empty()) throw std::invalid_argument("empty centerline");
  std::vector<double> errors;
  errors.reserve(trajectory.size());
  for (const TrajectorySample& s : trajectory) {
    errors.push_back(centerline.project({s.x, s.y}).distance);
  }
  return errors;
}

EpisodeMetrics compute_metrics(const EpisodeResult& episode, const Polyline& centerline) {
  EpisodeMetrics m;
  m.completed = episode.completed;
  m.clearance_time = episode.clearance_time;
  m.stop_events = episode.stop_events;

  if (!episode.trajectory.empty()) {
    double abs_sum = 0.0, sq_sum = 0.0, heading_sum = 0.0;
    for (const TrajectorySample& s : episode.trajectory) {
      const PathProjection proj = centerline.project({s.x, s.y});
      abs_sum += proj.distance;
      sq_sum += proj.distance * proj.distance;
      heading_sum += std::abs(wrap_angle(s.theta - proj.tangent_heading));
    }
    const double n = static_cast<double>(episode.trajectory.size());
    m.mae = abs_sum / n;
    m.mse = sq_sum / n;
    m.heading_avg = heading_sum / n;
  }

  if (!episode.commands.empty()) {
    double v_sum = 0.0, w_sum = 0.0;
    for (const CommandSample& c : episode.commands) {
      v_sum += c.v_smooth;
      w_sum += c.omega_smooth;
    }
    const double n = static_cast<double>(episode.commands.size());
    m.v_avg = v_sum / n;
    const double w_mean = w_sum / n;
    double var = 0.0;
    for (const CommandSample& c : episode.commands) {
      var += (c.omega_smooth - w_mean) * (c.omega_smooth - w_mean);
    }
    m.omega_stddev = std::sqrt(var / n);  // population form
  }
  return m;
}

namespace {

MetricStat stat_of(const std::vector<double>& values) {
  MetricStat s;
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / (values.size() - 1));  // sample stddev
  }
  return s;
}

}  // namespace

RunSummary aggregate(const std::vector<EpisodeMetrics>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
  RunSummary out;
  out.runs = static_cast<int>(runs.size());

  std::vector<double> clearance, mae, mse, heading, v_avg, w_std;
  for (const EpisodeMetrics& r : runs) {
    if (r.completed) {
      clearance.push_back(r.clearance_time);
      ++out.completed_runs;
    }
    mae.push_back(r.mae);
    mse.push_back(r.mse);
    heading.push_back(r.heading_avg);
    v_avg.push_back(r.v_avg);
    w_std.push_back(r.omega_stddev);
    out.stop_events_total += r.stop_events;
  }
  out.clearance_time = stat_of(clearance);
  out.mae = stat_of(mae);
  out.mse = stat_of(mse);
  out.heading_avg = stat_of(heading);
  out.v_avg = stat_of(v_avg);
  out.omega_stddev = stat_of(w_std);
  return out;
}

}  // namespace rownav
