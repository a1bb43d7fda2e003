#pragma once

#include "rownav/camera.hpp"
#include "rownav/grid.hpp"
#include "rownav/world.hpp"

namespace rownav {

/// One synthetic RGB-D acquisition: oracle vegetation mask plus range image.
/// Every mask=1 cell has depth < max_range; misses carry kNoReturnDepth.
struct FrameObservation {
  VegetationMask mask;
  DepthImage depth;
  double timestamp = 0.0;
};

/// Pinhole raycast of the world. Nearest plant hit within range sets
/// mask=1 and the range; ground hits set mask=0 with their range; sky is a
/// no-return. Deterministic for identical inputs.
FrameObservation render(const World& world, const CameraPose& pose, const CameraModel& cam);

}  // namespace rownav
