#include "rownav/camera.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rownav {

namespace {
constexpr double kDegToRad = 0.017453292519943295;
constexpr double kMaxTerrainTilt = 2.0 * kDegToRad;
}  // namespace

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (hfov_deg <= 0.0 || hfov_deg >= 180.0 || vfov_deg <= 0.0 || vfov_deg >= 180.0) {
    throw std::invalid_argument("field of view must be in (0, 180) degrees");
  }
  if (max_range <= 0.0) throw std::invalid_argument("max_range must be > 0");
}

CameraPose camera_pose(const RobotPose& pose, const CameraModel& cam, double pitch_extra,
                       double roll_extra) {
  const double yaw = pose.theta;
  const double pitch = cam.pitch_deg * kDegToRad + pitch_extra;
  const double roll = roll_extra;

  const double ct = std::cos(yaw), st = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);

  CameraPose out;
  out.origin = {pose.x + cam.forward_offset * ct, pose.y + cam.forward_offset * st,
                pose.z + cam.mount_height};
  // Rz(yaw) * Ry(-pitch) * Rx(roll) applied to the body axes (x fwd, y left, z up).
  out.forward = {ct * cp, st * cp, sp};
  out.left = {-ct * sp * sr - st * cr, -st * sp * sr + ct * cr, cp * sr};
  out.up = {-ct * sp * cr + st * sr, -st * sp * cr - ct * sr, cp * cr};
  return out;
}

CameraPose camera_pose_on_terrain(const RobotPose& pose, const CameraModel& cam,
                                  const World& world) {
  double dzdx = 0.0, dzdy = 0.0;
  terrain_gradient(world, pose.x, pose.y, &dzdx, &dzdy);
  const double ct = std::cos(pose.theta), st = std::sin(pose.theta);
  const double slope_fwd = dzdx * ct + dzdy * st;
  const double slope_left = -dzdx * st + dzdy * ct;
  const double pitch_extra =
      std::clamp(std::atan(slope_fwd), -kMaxTerrainTilt, kMaxTerrainTilt);
  const double roll_extra =
      std::clamp(std::atan(slope_left), -kMaxTerrainTilt, kMaxTerrainTilt);

  RobotPose grounded = pose;
  grounded.z = terrain_height(world, pose.x, pose.y);
  return camera_pose(grounded, cam, pitch_extra, roll_extra);
}

}  // namespace rownav
