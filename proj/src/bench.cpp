#include "rownav/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "rownav/camera.hpp"
#include "rownav/controller.hpp"
#include "rownav/episode.hpp"
#include "rownav/perception.hpp"
#include "rownav/render.hpp"
#include "rownav/world.hpp"

namespace rownav {

namespace {

using Clock = std::chrono::steady_clock;

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double idx = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

BenchStage make_stage(const std::string& name, const std::vector<double>& ms) {
  BenchStage s;
  s.stage = name;
  s.samples = static_cast<int>(ms.size());
  s.p50_ms = percentile(ms, 0.50);
  s.p99_ms = percentile(ms, 0.99);
  return s;
}

}  // namespace

BenchReport run_benchmark(int samples) {
  // The pear field is the densest scene and therefore the costliest to
  // render and perceive; the budget has to hold there.
  const World world = generate_world(WorldConfig::for_crop(Crop::PearField, 7));
  const CameraModel cam;
  PerceptionConfig perception;
  perception.depth_threshold = 8.0;
  ControllerConfig controller;

  const Polyline& line = ground_truth_centerline(world);

  std::vector<double> render_ms, perceive_ms, control_ms;
  MaskBuffer buffer(perception.history);
  CommandFilterState filter;
  FrameObservation frame;

  for (int k = -1; k < samples; ++k) {
    // Walk the camera down the row so frames differ.
    RobotPose pose;
    const double s = 0.5 + 0.05 * (k + 1);
    const Vec2 p = line.point_at(s);
    pose.x = p.x;
    pose.y = p.y;
    pose.theta = line.heading_at(s);
    pose.z = terrain_height(world, pose.x, pose.y);

    const auto t0 = Clock::now();
    frame = render(world, camera_pose_on_terrain(pose, cam, world), cam);
    const auto t1 = Clock::now();
    buffer.push(frame.mask);
    const auto xh = perceive(buffer, frame.depth, perception);
    const auto t2 = Clock::now();
    VelocityCommand cmd =
        xh ? compute_command(compute_offset(*xh, controller.frame_width), controller)
           : stop_command();
    cmd = ema_filter(filter, cmd, controller.ema_lambda);
    const auto t3 = Clock::now();
    (void)cmd;

    if (k < 0) continue;  // warmup
    render_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    perceive_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
    control_ms.push_back(std::chrono::duration<double, std::milli>(t3 - t2).count());
  }

  BenchReport report;
  report.stages.push_back(make_stage("render", render_ms));
  report.stages.push_back(make_stage("perceive", perceive_ms));
  report.stages.push_back(make_stage("control", control_ms));
  report.within_budget = report.stages[1].p99_ms < report.perceive_budget_ms;
  return report;
}

std::string bench_report_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "stage,samples,p50_ms,p99_ms\n";
  char buf[128];
  for (const BenchStage& s : report.stages) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.4f,%.4f\n", s.stage.c_str(), s.samples, s.p50_ms,
                  s.p99_ms);
    out << buf;
  }
  return out.str();
}

}  // namespace rownav
