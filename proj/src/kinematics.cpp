#include "rownav/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace rownav {

RobotPose step_kinematics(const RobotPose& pose, const VelocityCommand& cmd, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
  RobotPose out = pose;

  // Chord formulation of the arc: displacement v*dt*sinc(u) along the mean
  // heading, u = omega*dt/2. Stable for omega -> 0 and exact otherwise.
  const double u = 0.5 * cmd.omega_z * dt;
  double sinc_u;
  if (std::abs(u) < 1e-6) {
    sinc_u = 1.0 - u * u / 6.0;
  } else {
    sinc_u = std::sin(u) / u;
  }
  const double chord = cmd.v_x * dt * sinc_u;
  const double mid_heading = pose.theta + u;
  out.x += chord * std::cos(mid_heading);
  out.y += chord * std::sin(mid_heading);
  out.theta = wrap_angle(pose.theta + cmd.omega_z * dt);
  return out;
}

}  // namespace rownav
