#pragma once

#include <string>

#include "rownav/grid.hpp"

namespace rownav {

// Binary PGM (P5) fixture format. Masks are 8-bit with {0, 255}; depth maps
// are 16-bit millimeters (big-endian per the format), with 65535 standing in
// for the no-return sentinel.

void write_mask_pgm(const std::string& path, const VegetationMask& mask);
VegetationMask read_mask_pgm(const std::string& path);

void write_depth_pgm(const std::string& path, const DepthImage& depth);
DepthImage read_depth_pgm(const std::string& path);

}  // namespace rownav
