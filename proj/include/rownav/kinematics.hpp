#pragma once

#include "rownav/controller.hpp"
#include "rownav/geometry.hpp"

namespace rownav {

struct RobotPose {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, wrapped to (-pi, pi]
  double z = 0.0;      // terrain height under the robot, set by the episode loop
};

/// Exact unicycle step: a straight segment when omega is ~0, otherwise a
/// circular arc of radius v/omega. No Euler drift.
RobotPose step_kinematics(const RobotPose& pose, const VelocityCommand& cmd, double dt);

}  // namespace rownav
