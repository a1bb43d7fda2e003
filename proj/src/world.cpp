#include "rownav/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rownav/rng.hpp"

namespace rownav {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kTerrainWavelengthX = 3.1;  // m
constexpr double kTerrainWavelengthY = 2.3;  // m
}  // namespace

const char* crop_name(Crop c) {
  switch (c) {
    case Crop::CommonVineyard: return "common_vineyard";
    case Crop::PergolaVineyard: return "pergola_vineyard";
    case Crop::PearField: return "pear_field";
    case Crop::HighTreesField: return "high_trees_field";
  }
  return "unknown";
}

Crop crop_from_name(const std::string& name) {
  if (name == "common_vineyard") return Crop::CommonVineyard;
  if (name == "pergola_vineyard") return Crop::PergolaVineyard;
  if (name == "pear_field") return Crop::PearField;
  if (name == "high_trees_field") return Crop::HighTreesField;
  throw std::invalid_argument("unknown crop: " + name);
}

WorldConfig WorldConfig::for_crop(Crop crop, std::uint64_t seed, double curvature) {
  WorldConfig cfg;
  cfg.crop = crop;
  cfg.jitter_seed = seed;
  cfg.curvature = curvature;
  switch (crop) {
    case Crop::CommonVineyard:
      cfg.row_distance = 1.8;
      cfg.plant_distance = 1.3;
      cfg.plant_height = 2.0;
      break;
    case Crop::PergolaVineyard:
      cfg.row_distance = 6.0;
      cfg.plant_distance = 1.5;
      cfg.plant_height = 2.9;
      break;
    case Crop::PearField:
      cfg.row_distance = 2.0;
      cfg.plant_distance = 1.0;
      cfg.plant_height = 2.9;
      break;
    case Crop::HighTreesField:
      cfg.row_distance = 7.0;
      cfg.plant_distance = 5.0;
      cfg.plant_height = 12.5;
      break;
  }
  return cfg;
}

void WorldConfig::validate() const {
  if (row_distance <= 0.0) throw std::invalid_argument("row_distance must be > 0");
  if (plant_distance <= 0.0) throw std::invalid_argument("plant_distance must be > 0");
  if (plant_height <= 0.0) throw std::invalid_argument("plant_height must be > 0");
  if (track_length <= 0.0) throw std::invalid_argument("track_length must be > 0");
  if (terrain_roughness < 0.0) throw std::invalid_argument("terrain_roughness must be >= 0");
  if (margin_before < 0.0 || margin_after < 0.0) {
    throw std::invalid_argument("margins must be >= 0");
  }
  if (guard_rows < 0) throw std::invalid_argument("guard_rows must be >= 0");
}

namespace {

// Base path: straight line along +x from the origin, or a constant-curvature
// arc when curvature != 0. Parameterized by arc length.
struct BasePath {
  double curvature = 0.0;

  Vec2 point(double s) const {
    if (curvature == 0.0) return {s, 0.0};
    const double r = 1.0 / curvature;
    return {r * std::sin(curvature * s), r * (1.0 - std::cos(curvature * s))};
  }
  double heading(double s) const { return curvature * s; }
  Vec2 normal(double s) const {  // left-hand normal
    const double h = heading(s);
    return {-std::sin(h), std::cos(h)};
  }
  Vec2 offset_point(double s, double lateral) const {
    return point(s) + normal(s) * lateral;
  }
};

struct PlantShape {
  // Non-canopy primitives for one plant, relative to the plant base.
  std::vector<Primitive> prims;
};

PlantShape plant_shape(const WorldConfig& cfg) {
  PlantShape shape;
  auto ellipsoid = [&](double ax, double ay, double az, double cz) {
    Primitive p;
    p.kind = Primitive::Kind::Ellipsoid;
    p.center = {0.0, 0.0, cz};
    p.radii = {ax, ay, az};
    shape.prims.push_back(p);
  };
  auto cylinder = [&](double r, double z0, double z1) {
    Primitive p;
    p.kind = Primitive::Kind::VerticalCylinder;
    p.center = {0.0, 0.0, 0.5 * (z0 + z1)};
    p.radii = {r, r, 0.0};
    p.z0 = z0;
    p.z1 = z1;
    shape.prims.push_back(p);
  };

  const double pd = cfg.plant_distance;
  const double ph = cfg.plant_height;
  switch (cfg.crop) {
    case Crop::CommonVineyard: {
      cylinder(0.05, 0.0, 0.7);
      ellipsoid(0.55 * pd, 0.22, 0.5 * (ph - 0.7), 0.7 + 0.5 * (ph - 0.7));
      break;
    }
    case Crop::PergolaVineyard: {
      cylinder(0.05, 0.0, 1.9);
      ellipsoid(0.60 * pd, 0.30, 0.5, 2.2);
      break;
    }
    case Crop::PearField: {
      cylinder(0.06, 0.0, 1.0);
      ellipsoid(0.55, 0.55, 0.55, 1.40);
      ellipsoid(0.50, 0.50, 0.50, 2.00);
      ellipsoid(0.40, 0.40, 0.40, ph - 0.40);
      break;
    }
    case Crop::HighTreesField: {
      // Trunk and understory only; the clumped canopy is built per tree in
      // generate_world so each crown gets its own seeded leaf texture.
      cylinder(0.30, 0.0, 3.0);
      ellipsoid(2.2, 2.2, 1.3, 1.5);
      break;
    }
  }
  return shape;
}

double primitive_bound_radius(const Primitive& p) {
  if (p.kind == Primitive::Kind::Ellipsoid) {
    return std::max({p.radii.x, p.radii.y, p.radii.z});
  }
  const double half_h = 0.5 * (p.z1 - p.z0);
  return std::sqrt(p.radii.x * p.radii.x + half_h * half_h);
}

void append_cluster(World& world, const std::vector<Primitive>& prims) {
  PlantCluster cluster;
  cluster.first = static_cast<std::uint32_t>(world.primitives.size());
  cluster.count = static_cast<std::uint32_t>(prims.size());

  Vec3 lo{1e18, 1e18, 1e18}, hi{-1e18, -1e18, -1e18};
  for (const Primitive& p : prims) {
    const double b = primitive_bound_radius(p);
    lo.x = std::min(lo.x, p.center.x - b);
    lo.y = std::min(lo.y, p.center.y - b);
    lo.z = std::min(lo.z, p.center.z - b);
    hi.x = std::max(hi.x, p.center.x + b);
    hi.y = std::max(hi.y, p.center.y + b);
    hi.z = std::max(hi.z, p.center.z + b);
  }
  cluster.bound_center = (lo + hi) * 0.5;
  double r = 0.0;
  for (const Primitive& p : prims) {
    r = std::max(r, (p.center - cluster.bound_center).norm() + primitive_bound_radius(p));
  }
  cluster.bound_radius = r;

  world.primitives.insert(world.primitives.end(), prims.begin(), prims.end());
  world.clusters.push_back(cluster);
}

}  // namespace

World generate_world(const WorldConfig& cfg) {
  cfg.validate();
  World world;
  world.config = cfg;

  const BasePath path{cfg.curvature};
  const double s_begin = -cfg.margin_before;
  const double s_end = cfg.track_length + cfg.margin_after;
  const double half_row = cfg.row_distance / 2.0;

  Rng plant_rng(derive_seed(cfg.jitter_seed, "plants"));
  const PlantShape shape = plant_shape(cfg);

  // Rows of plants, with seeded along-track jitter (+-10% of spacing). The
  // navigated pair sits at +-row_distance/2; guard rows continue the field
  // pattern on both sides so that looking across a hedge shows the next row
  // instead of empty ground.
  std::vector<double> laterals{+half_row, -half_row};
  for (int m = 1; m <= cfg.guard_rows; ++m) {
    laterals.push_back(+half_row + m * cfg.row_distance);
    laterals.push_back(-half_row - m * cfg.row_distance);
  }
  std::vector<Vec2> row_pts[2];
  for (std::size_t side = 0; side < laterals.size(); ++side) {
    for (double s = s_begin; s <= s_end + 1e-9; s += cfg.plant_distance) {
      const double jitter = plant_rng.uniform(-0.1, 0.1) * cfg.plant_distance;
      const double sp = s + jitter;
      const Vec2 base = path.offset_point(sp, laterals[side]);
      const double yaw = path.heading(sp);

      std::vector<Primitive> prims = shape.prims;
      const double cos_y = std::cos(yaw), sin_y = std::sin(yaw);
      for (Primitive& p : prims) {
        const double lx = p.center.x, ly = p.center.y;
        p.center.x = base.x + cos_y * lx - sin_y * ly;
        p.center.y = base.y + sin_y * lx + cos_y * ly;
        p.yaw = yaw;
      }
      append_cluster(world, prims);

      if (cfg.crop == Crop::HighTreesField) {
        // Crown built from seeded leaf clumps inside a spherical envelope
        // whose radius forces the merge past the row center. One clump is
        // pinned to the corridor-side edge so the merge is guaranteed, not
        // just likely. Each clump is its own render cluster.
        Rng crown_rng(plant_rng.next_u64());
        const double envelope_r = cfg.row_distance / 2.0 + 0.5;
        const double crown_z = 7.5;
        const double inner_sign = laterals[side] > 0.0 ? -1.0 : 1.0;
        // trees lean: the whole crown shifts off the trunk while the
        // understory stays put
        const double lean_x = crown_rng.uniform(-0.7, 0.7);
        const double lean_y = crown_rng.uniform(-0.7, 0.7);

        auto add_clump = [&](double ox, double oy, double oz, double r) {
          Primitive p;
          p.kind = Primitive::Kind::Ellipsoid;
          p.center = {base.x + lean_x + ox, base.y + lean_y + oy, crown_z + oz};
          p.radii = {r, r, r};
          append_cluster(world, {p});
        };
        // pinned inner clump: reaches past the centerline even at full
        // outward lean (3.5 - (2.6 - 0.7) - 1.9 < 0)
        add_clump(0.0, inner_sign * 2.6, 0.0, 1.9);
        add_clump(0.0, 0.0, 0.0, 2.6);  // core mass
        add_clump(0.0, 0.0, cfg.plant_height - 3.2 - crown_z, 1.9);  // sets the tree top
        for (int k = 0; k < 7; ++k) {
          const double r = crown_rng.uniform(0.9, 2.0);
          const double reach = envelope_r - r;
          // rejection-free radial sampling, biased outward for a patchy shell
          const double u = std::cbrt(crown_rng.uniform(0.3, 1.0)) * reach;
          const double az = crown_rng.uniform(0.0, kTwoPi);
          const double el = crown_rng.uniform(-0.9, 0.9);
          double oz = u * std::sin(el);
          // keep clump bottoms out of the understory band so the crown
          // texture stays overhead/far rather than beside the camera
          if (crown_z + oz - r < 5.0) oz = 5.0 - crown_z + r;
          add_clump(u * std::cos(az) * std::cos(el), u * std::sin(az) * std::cos(el), oz, r);
        }
      }
      if (side < 2) row_pts[side].push_back(base);
    }
  }
  world.left_row = Polyline(row_pts[0]);
  world.right_row = Polyline(row_pts[1]);

  // Pergola: overhead canopy slab over the left half of each inter-row
  // corridor, approximated by a chain of short vertical cylinders. The other
  // half keeps open sky, giving the asymmetric occlusion this crop is known
  // for; the pattern repeats across the guard corridors.
  double corridor_offset = 0.0;
  if (cfg.crop == Crop::PergolaVineyard) {
    const double canopy_inner = 0.5;       // lateral edge of the slab, navigated corridor
    const double canopy_outer = half_row;  // slab reaches the left row
    const double canopy_r = 0.5 * (canopy_outer - canopy_inner);
    const double z1 = cfg.plant_height;
    const double z0 = z1 - 0.2;
    for (int k = -cfg.guard_rows; k <= cfg.guard_rows; ++k) {
      const double canopy_mid = k * cfg.row_distance + 0.5 * (canopy_inner + canopy_outer);
      for (double s = s_begin; s <= s_end + 1e-9; s += 1.0) {
        const Vec2 c = path.offset_point(s, canopy_mid);
        Primitive p;
        p.kind = Primitive::Kind::VerticalCylinder;
        p.center = {c.x, c.y, 0.5 * (z0 + z1)};
        p.radii = {canopy_r, canopy_r, 0.0};
        p.z0 = z0;
        p.z1 = z1;
        append_cluster(world, {p});
      }
    }
    // Free corridor: between the right-row foliage edge and the canopy edge.
    const double foliage_half_width = 0.30;
    corridor_offset = 0.5 * ((-half_row + foliage_half_width) + canopy_inner);
  }

  // Ground-truth path, sampled at 0.1 m and extended a little past the end
  // line so projections stay lateral while the robot crosses it.
  std::vector<Vec2> center_pts;
  for (double s = 0.0; s <= cfg.track_length + 4.0 + 1e-9; s += 0.1) {
    center_pts.push_back(path.offset_point(s, corridor_offset));
  }
  world.centerline = Polyline(center_pts);

  Rng terrain_rng(derive_seed(cfg.jitter_seed, "terrain"));
  world.terrain_phase_x = terrain_rng.uniform(0.0, kTwoPi);
  world.terrain_phase_y = terrain_rng.uniform(0.0, kTwoPi);
  return world;
}

const Polyline& ground_truth_centerline(const World& world) { return world.centerline; }

double terrain_height(const World& world, double x, double y) {
  const double a = world.config.terrain_roughness;
  if (a == 0.0) return 0.0;
  return a * std::sin(kTwoPi * x / kTerrainWavelengthX + world.terrain_phase_x) *
         std::cos(kTwoPi * y / kTerrainWavelengthY + world.terrain_phase_y);
}

void terrain_gradient(const World& world, double x, double y, double* dzdx, double* dzdy) {
  const double a = world.config.terrain_roughness;
  if (a == 0.0) {
    *dzdx = 0.0;
    *dzdy = 0.0;
    return;
  }
  const double kx = kTwoPi / kTerrainWavelengthX;
  const double ky = kTwoPi / kTerrainWavelengthY;
  const double sx = std::sin(kx * x + world.terrain_phase_x);
  const double cx = std::cos(kx * x + world.terrain_phase_x);
  const double sy = std::sin(ky * y + world.terrain_phase_y);
  const double cy = std::cos(ky * y + world.terrain_phase_y);
  *dzdx = a * kx * cx * cy;
  *dzdy = -a * ky * sx * sy;
}

}  // namespace rownav
