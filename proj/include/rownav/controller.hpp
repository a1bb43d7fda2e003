#pragma once

namespace rownav {

struct ControllerConfig {
  double v_max = 0.5;       // m/s
  double omega_max = 1.0;   // rad/s
  double omega_gain = 0.01; // rad/s per pixel of offset
  double ema_lambda = 0.5;  // (0, 1]; 0.5 matches an EMA span of 3 samples
  int frame_width = 224;    // pixels

  void validate() const;  // throws std::invalid_argument
};

struct VelocityCommand {
  double v_x = 0.0;      // m/s, forward
  double omega_z = 0.0;  // rad/s, counter-clockwise positive
};

struct CommandFilterState {
  VelocityCommand previous;
  bool initialized = false;
};

/// Signed pixel distance of the row center from the frame center: x_h - w/2.
double compute_offset(double row_center_col, int frame_width);

/// Quadratic speed law plus proportional steering:
///   v_x     = v_max * (1 - d^2 / (w/2)^2), clamped to [0, v_max]
///   omega_z = -omega_gain * d,             clamped to [-omega_max, omega_max]
VelocityCommand compute_command(double offset_px, const ControllerConfig& cfg);

/// Zero command, issued when perception reports no gap.
VelocityCommand stop_command();

/// Exponential moving average: out = (1-lambda)*previous + lambda*cmd.
/// The first call passes the command through and initializes the state.
VelocityCommand ema_filter(CommandFilterState& state, const VelocityCommand& cmd, double lambda);

}  // namespace rownav
