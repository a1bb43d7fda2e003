#pragma once

#include <string>
#include <vector>

#include "rownav/camera.hpp"
#include "rownav/controller.hpp"
#include "rownav/kinematics.hpp"
#include "rownav/perception.hpp"
#include "rownav/render.hpp"
#include "rownav/world.hpp"

namespace rownav {

/// Fixed-step schedule. Every rate must divide the base rate so the loop
/// stays deterministic: with the defaults, renders land on every 2nd tick,
/// perception on every 3rd, control on every 12th.
struct LoopRates {
  int base_hz = 60;
  int render_hz = 30;
  int perception_hz = 20;
  int control_hz = 5;

  void validate() const;
  double base_dt() const { return 1.0 / base_hz; }
};

struct EpisodeOptions {
  double max_duration = 240.0;        // s of simulated time before declaring a timeout
  double start_lateral_offset = 0.0;  // m, perpendicular to the start tangent
  double start_heading_offset = 0.0;  // rad
  double divergence_lateral = -1.0;   // m; < 0 means "use the world row distance"
  double depth_noise_sigma = 0.0;     // multiplicative depth noise; 0 = oracle depth
  double mask_noise_prob = 0.0;       // per-pixel flip rate emulating an imperfect mask source
  std::uint64_t noise_seed = 0;
  std::string debug_frame_dir;        // dump every rendered frame as PGM when non-empty
};

/// One row per base tick: pose plus the perception/command values in effect.
/// x_h and d are NaN while perception reports no gap (or before the first
/// perception update).
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0, y = 0.0, theta = 0.0;
  double x_h = 0.0, d = 0.0;
  double v_raw = 0.0, omega_raw = 0.0;
  double v_smooth = 0.0, omega_smooth = 0.0;
};

/// One row per control update (the commands actually sent to the platform).
struct CommandSample {
  double t = 0.0;
  double x_h = 0.0, d = 0.0;
  double v_raw = 0.0, omega_raw = 0.0;
  double v_smooth = 0.0, omega_smooth = 0.0;
};

struct EpisodeResult {
  std::vector<TrajectorySample> trajectory;
  std::vector<CommandSample> commands;
  bool completed = false;
  std::string failure_reason;       // "timeout" or "diverged" when not completed
  double clearance_time = 0.0;      // s; valid only when completed
  double duration = 0.0;            // simulated time actually run
  int stop_events = 0;              // runs of consecutive no-gap perceptions
  long nogap_updates = 0;
  long render_count = 0;
  long perception_count = 0;
  long control_count = 0;
};

/// Closed-loop run: render -> perceive -> control at their own rates, exact
/// unicycle integration every base tick, ending at the end line
/// (track_length of along-track progress), on timeout, or on divergence.
EpisodeResult run_episode(const World& world, const CameraModel& cam,
                          const PerceptionConfig& perception, const ControllerConfig& controller,
                          const LoopRates& rates = {}, const EpisodeOptions& options = {});

}  // namespace rownav
