#pragma once

#include "rownav/geometry.hpp"
#include "rownav/kinematics.hpp"
#include "rownav/world.hpp"

namespace rownav {

struct CameraModel {
  int width = 224;
  int height = 224;
  double hfov_deg = 87.0;        // D435i-class defaults
  double vfov_deg = 58.0;
  double forward_offset = 0.20;  // m ahead of the robot center
  double mount_height = 0.40;    // m above the robot base
  double pitch_deg = 15.0;       // optical axis tilt above horizontal
  double max_range = 12.0;       // m

  void validate() const;
};

/// Orthonormal camera frame in world coordinates.
struct CameraPose {
  Vec3 origin;
  Vec3 forward;
  Vec3 left;
  Vec3 up;
};

/// Camera pose for a robot pose: origin 20 cm along the heading at mount
/// height, axis pitched up, with optional extra pitch/roll (terrain tilt).
CameraPose camera_pose(const RobotPose& pose, const CameraModel& cam, double pitch_extra = 0.0,
                       double roll_extra = 0.0);

/// Same, with the robot standing on the world's terrain: base height and
/// attitude perturbation (clamped to +-2 degrees) come from the height field.
CameraPose camera_pose_on_terrain(const RobotPose& pose, const CameraModel& cam,
                                  const World& world);

}  // namespace rownav
