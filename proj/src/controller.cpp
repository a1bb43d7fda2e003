#include "rownav/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace rownav {

void ControllerConfig::validate() const {
  if (v_max <= 0.0) throw std::invalid_argument("v_max must be > 0");
  if (omega_max <= 0.0) throw std::invalid_argument("omega_max must be > 0");
  if (omega_gain <= 0.0) throw std::invalid_argument("omega_gain must be > 0");
  if (ema_lambda <= 0.0 || ema_lambda > 1.0) {
    throw std::invalid_argument("ema_lambda must be in (0, 1]");
  }
  if (frame_width <= 0) throw std::invalid_argument("frame_width must be > 0");
}

double compute_offset(double row_center_col, int frame_width) {
  return row_center_col - frame_width / 2.0;
}

VelocityCommand compute_command(double offset_px, const ControllerConfig& cfg) {
  const double half_w = cfg.frame_width / 2.0;
  VelocityCommand cmd;
  cmd.v_x = std::clamp(cfg.v_max * (1.0 - (offset_px * offset_px) / (half_w * half_w)),
                       0.0, cfg.v_max);
  cmd.omega_z = std::clamp(-cfg.omega_gain * offset_px, -cfg.omega_max, cfg.omega_max);
  return cmd;
}

VelocityCommand stop_command() { return {0.0, 0.0}; }

VelocityCommand ema_filter(CommandFilterState& state, const VelocityCommand& cmd, double lambda) {
  if (lambda <= 0.0 || lambda > 1.0) throw std::invalid_argument("ema lambda must be in (0, 1]");
  if (!state.initialized) {
    state.previous = cmd;
    state.initialized = true;
    return cmd;
  }
  VelocityCommand out;
  out.v_x = (1.0 - lambda) * state.previous.v_x + lambda * cmd.v_x;
  out.omega_z = (1.0 - lambda) * state.previous.omega_z + lambda * cmd.omega_z;
  state.previous = out;
  return out;
}

}  // namespace rownav
