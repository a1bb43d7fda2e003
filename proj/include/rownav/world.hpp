#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rownav/geometry.hpp"

namespace rownav {

enum class Crop { CommonVineyard, PergolaVineyard, PearField, HighTreesField };

const char* crop_name(Crop c);
Crop crop_from_name(const std::string& name);

struct WorldConfig {
  Crop crop = Crop::CommonVineyard;
  double row_distance = 1.8;    // m between the two row lines
  double plant_distance = 1.3;  // m between plants along a row
  double plant_height = 2.0;    // m
  double track_length = 20.0;   // scored along-track distance
  double curvature = 0.0;       // 1/m; 0 = straight rows
  std::uint64_t jitter_seed = 0;
  double terrain_roughness = 0.02;  // m, amplitude of the terrain height field
  double margin_before = 4.0;       // row extension behind the start line
  double margin_after = 10.0;       // row extension past the end line
  int guard_rows = 2;               // extra field rows flanking the navigated pair

  /// Table of per-crop row/plant/height presets.
  static WorldConfig for_crop(Crop crop, std::uint64_t seed = 0, double curvature = 0.0);

  void validate() const;
};

/// Raycastable solid. Ellipsoids model foliage; finite vertical cylinders
/// model trunks, poles and overhead canopy segments.
struct Primitive {
  enum class Kind { Ellipsoid, VerticalCylinder };
  Kind kind = Kind::Ellipsoid;
  Vec3 center;       // ellipsoid center; for cylinders x/y give the axis
  Vec3 radii;        // ellipsoid semi-axes; cylinders use radii.x
  double z0 = 0.0;   // cylinder extent
  double z1 = 0.0;
  double yaw = 0.0;  // ellipsoid rotation about z, keeps hedges row-aligned on curves
};

/// Group of primitives under one bounding sphere (one plant, or one canopy
/// segment). The renderer culls and pretests on the bound.
struct PlantCluster {
  Vec3 bound_center;
  double bound_radius = 0.0;
  std::uint32_t first = 0;  // range into World::primitives
  std::uint32_t count = 0;
};

struct World {
  WorldConfig config;
  std::vector<Primitive> primitives;
  std::vector<PlantCluster> clusters;
  Polyline left_row;    // interpolated plant line, left of travel
  Polyline right_row;
  Polyline centerline;  // ground-truth path (free-corridor midline for pergola)
  double terrain_phase_x = 0.0;
  double terrain_phase_y = 0.0;
};

/// Deterministic for a fixed config (including jitter_seed).
World generate_world(const WorldConfig& cfg);

/// Ground-truth navigation path: the mean of the two interpolated row curves,
/// except for the pergola where it is the midline of the corridor left free
/// of overhead vegetation.
const Polyline& ground_truth_centerline(const World& world);

/// Seeded low-frequency height field standing in for uneven terrain.
double terrain_height(const World& world, double x, double y);

/// Terrain slopes at (x, y), used to perturb the camera attitude.
void terrain_gradient(const World& world, double x, double y, double* dzdx, double* dzdy);

}  // namespace rownav
