#include "rownav/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "rownav/pgm.hpp"
#include "rownav/rng.hpp"

namespace rownav {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_divides(int base_hz, int rate_hz, const char* name) {
  if (rate_hz < 1 || base_hz % rate_hz != 0) {
    throw std::invalid_argument(std::string(name) + " rate must divide the base rate");
  }
}

void apply_depth_noise(DepthImage& depth, const VegetationMask& mask, double sigma,
                       double max_range, Rng& rng) {
  auto& cells = depth.cells();
  const auto& m = mask.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c] >= kNoReturnDepth) continue;
    double d = cells[c] * (1.0 + sigma * rng.gaussian());
    if (d < 0.0) d = 0.0;
    // keep hit pixels consistent with the mask invariant
    if (m[c] != 0 && d >= max_range) d = std::nextafter(max_range, 0.0);
    cells[c] = d;
  }
}

// Per-pixel classification errors, the way an imperfect mask source would
// disagree with the oracle.
void apply_mask_noise(VegetationMask& mask, double flip_prob, Rng& rng) {
  for (auto& c : mask.cells()) {
    if (rng.uniform() < flip_prob) c = c ? 0 : 1;
  }
}

}  // namespace

void LoopRates::validate() const {
  if (base_hz < 1) throw std::invalid_argument("base rate must be >= 1 Hz");
  check_divides(base_hz, render_hz, "render");
  check_divides(base_hz, perception_hz, "perception");
  check_divides(base_hz, control_hz, "control");
}

EpisodeResult run_episode(const World& world, const CameraModel& cam,
                          const PerceptionConfig& perception, const ControllerConfig& controller,
                          const LoopRates& rates, const EpisodeOptions& options) {
  rates.validate();
  perception.validate();
  controller.validate();
  cam.validate();
  if (controller.frame_width != cam.width) {
    throw std::invalid_argument("controller frame width must match the camera image width");
  }
  if (perception.smoothing_window > cam.width) {
    throw std::invalid_argument("smoothing window exceeds the camera image width");
  }

  const Polyline& centerline = ground_truth_centerline(world);
  const double dt = rates.base_dt();
  const int render_div = rates.base_hz / rates.render_hz;
  const int perception_div = rates.base_hz / rates.perception_hz;
  const int control_div = rates.base_hz / rates.control_hz;
  const double divergence_limit =
      options.divergence_lateral > 0.0 ? options.divergence_lateral : world.config.row_distance;

  EpisodeResult result;
  const long total_ticks = std::lround(options.max_duration * rates.base_hz);
  if (total_ticks <= 0) {
    result.failure_reason = "timeout";
    return result;
  }
  result.trajectory.reserve(total_ticks + 1);

  // Start on the ground-truth line, heading along it.
  RobotPose pose;
  {
    const Vec2 start = centerline.point_at(0.0);
    const double heading = centerline.heading_at(0.0);
    pose.x = start.x - std::sin(heading) * options.start_lateral_offset;
    pose.y = start.y + std::cos(heading) * options.start_lateral_offset;
    pose.theta = wrap_angle(heading + options.start_heading_offset);
    pose.z = terrain_height(world, pose.x, pose.y);
  }

  MaskBuffer buffer(perception.history);
  CommandFilterState filter;
  Rng noise_rng(derive_seed(options.noise_seed, "depth-noise"));

  FrameObservation frame;
  bool have_frame = false;
  bool have_gap = false;     // latest perception found a row center
  bool prev_nogap = false;   // for stop-event edges
  double latest_xh = kNan;
  VelocityCommand raw_cmd;
  VelocityCommand smooth_cmd;
  double prev_s = centerline.project({pose.x, pose.y}).arc_length;

  const bool debug_dump = !options.debug_frame_dir.empty();
  if (debug_dump) std::filesystem::create_directories(options.debug_frame_dir);

  for (long k = 0; k < total_ticks; ++k) {
    const double t = k * dt;

    if (k % render_div == 0) {
      frame = render(world, camera_pose_on_terrain(pose, cam, world), cam);
      frame.timestamp = t;
      if (options.depth_noise_sigma > 0.0) {
        apply_depth_noise(frame.depth, frame.mask, options.depth_noise_sigma, cam.max_range,
                          noise_rng);
      }
      if (options.mask_noise_prob > 0.0) {
        apply_mask_noise(frame.mask, options.mask_noise_prob, noise_rng);
      }
      have_frame = true;
      if (debug_dump) {
        char name[64];
        std::snprintf(name, sizeof(name), "/frame_%06ld", result.render_count);
        write_mask_pgm(options.debug_frame_dir + name + "_mask.pgm", frame.mask);
        write_depth_pgm(options.debug_frame_dir + name + "_depth.pgm", frame.depth);
      }
      ++result.render_count;
    }

    if (k % perception_div == 0 && have_frame) {
      buffer.push(frame.mask);
      const std::optional<double> xh = perceive(buffer, frame.depth, perception);
      have_gap = xh.has_value();
      latest_xh = have_gap ? *xh : kNan;
      if (!have_gap) {
        ++result.nogap_updates;
        if (!prev_nogap) ++result.stop_events;
      }
      prev_nogap = !have_gap;
      ++result.perception_count;
    }

    if (k % control_div == 0) {
      double d = kNan;
      if (have_gap) {
        d = compute_offset(latest_xh, controller.frame_width);
        raw_cmd = compute_command(d, controller);
      } else {
        raw_cmd = stop_command();
      }
      smooth_cmd = ema_filter(filter, raw_cmd, controller.ema_lambda);
      result.commands.push_back({t, latest_xh, d, raw_cmd.v_x, raw_cmd.omega_z, smooth_cmd.v_x,
                                 smooth_cmd.omega_z});
      ++result.control_count;
    }

    const double d_now = have_gap ? compute_offset(latest_xh, controller.frame_width) : kNan;
    result.trajectory.push_back({t, pose.x, pose.y, pose.theta, latest_xh, d_now, raw_cmd.v_x,
                                 raw_cmd.omega_z, smooth_cmd.v_x, smooth_cmd.omega_z});

    pose = step_kinematics(pose, smooth_cmd, dt);
    pose.z = terrain_height(world, pose.x, pose.y);
    result.duration = (k + 1) * dt;

    const PathProjection proj = centerline.project({pose.x, pose.y});
    if (proj.arc_length >= world.config.track_length) {
      result.completed = true;
      // Interpolate the crossing instant inside this tick.
      const double gain = proj.arc_length - prev_s;
      double frac = 1.0;
      if (gain > 1e-12) {
        frac = (world.config.track_length - prev_s) / gain;
        frac = std::clamp(frac, 0.0, 1.0);
      }
      result.clearance_time = t + frac * dt;
      break;
    }
    prev_s = proj.arc_length;

    if (proj.distance > divergence_limit) {
      result.failure_reason = "diverged";
      break;
    }
  }

  if (!result.completed && result.failure_reason.empty()) result.failure_reason = "timeout";

  // Final pose row so the trajectory covers the full run.
  result.trajectory.push_back({result.duration, pose.x, pose.y, pose.theta, latest_xh,
                               have_gap ? compute_offset(latest_xh, controller.frame_width) : kNan,
                               raw_cmd.v_x, raw_cmd.omega_z, smooth_cmd.v_x, smooth_cmd.omega_z});
  return result;
}

}  // namespace rownav
