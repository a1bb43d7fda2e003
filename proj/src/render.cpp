#include "rownav/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rownav {

namespace {

constexpr double kRayEps = 1e-9;

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

// Nearest positive intersection with an ellipsoid, optionally yawed about z.
double hit_ellipsoid(const Ray& ray, const Primitive& p) {
  Vec3 oc = ray.origin - p.center;
  Vec3 d = ray.dir;
  if (p.yaw != 0.0) {
    const double c = std::cos(-p.yaw), s = std::sin(-p.yaw);
    oc = {c * oc.x - s * oc.y, s * oc.x + c * oc.y, oc.z};
    d = {c * d.x - s * d.y, s * d.x + c * d.y, d.z};
  }
  const double ox = oc.x / p.radii.x, oy = oc.y / p.radii.y, oz = oc.z / p.radii.z;
  const double dx = d.x / p.radii.x, dy = d.y / p.radii.y, dz = d.z / p.radii.z;
  const double a = dx * dx + dy * dy + dz * dz;
  const double b = ox * dx + oy * dy + oz * dz;
  const double c = ox * ox + oy * oy + oz * oz - 1.0;
  const double disc = b * b - a * c;
  if (disc < 0.0) return -1.0;
  const double sq = std::sqrt(disc);
  double t = (-b - sq) / a;
  if (t < kRayEps) t = (-b + sq) / a;  // origin inside
  return t >= kRayEps ? t : -1.0;
}

// Nearest positive intersection with a finite vertical cylinder (side + caps).
double hit_cylinder(const Ray& ray, const Primitive& p) {
  const double r = p.radii.x;
  const double ox = ray.origin.x - p.center.x;
  const double oy = ray.origin.y - p.center.y;
  const double dx = ray.dir.x, dy = ray.dir.y, dz = ray.dir.z;

  double best = -1.0;
  const double a = dx * dx + dy * dy;
  if (a > 1e-16) {
    const double b = ox * dx + oy * dy;
    const double c = ox * ox + oy * oy - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (const double t : {(-b - sq) / a, (-b + sq) / a}) {
        if (t < kRayEps) continue;
        const double z = ray.origin.z + t * dz;
        if (z >= p.z0 && z <= p.z1 && (best < 0.0 || t < best)) best = t;
      }
    }
  }
  if (std::abs(dz) > 1e-16) {
    for (const double zc : {p.z0, p.z1}) {
      const double t = (zc - ray.origin.z) / dz;
      if (t < kRayEps || (best >= 0.0 && t >= best)) continue;
      const double hx = ox + t * dx, hy = oy + t * dy;
      if (hx * hx + hy * hy <= r * r) best = t;
    }
  }
  return best;
}

double hit_primitive(const Ray& ray, const Primitive& p) {
  return p.kind == Primitive::Kind::Ellipsoid ? hit_ellipsoid(ray, p) : hit_cylinder(ray, p);
}

// Does the ray pass within the bounding sphere, closer than t_max?
bool hits_bound(const Ray& ray, const Vec3& center, double radius, double t_max) {
  const Vec3 oc = center - ray.origin;
  const double proj = oc.dot(ray.dir);
  const double closest2 = oc.dot(oc) - proj * proj;
  if (closest2 > radius * radius) return false;
  const double entry = proj - std::sqrt(radius * radius - closest2);
  return entry < t_max;
}

struct Candidate {
  std::uint32_t cluster = 0;
  float t_lower = 0.0f;  // distance lower bound, for early exit
};

}  // namespace

FrameObservation render(const World& world, const CameraPose& pose, const CameraModel& cam) {
  cam.validate();
  const int w = cam.width, h = cam.height;
  FrameObservation frame;
  frame.mask = VegetationMask(w, h, 0);
  frame.depth = DepthImage(w, h, kNoReturnDepth);

  const double fx = (w / 2.0) / std::tan(0.5 * cam.hfov_deg * 0.017453292519943295);
  const double fy = (h / 2.0) / std::tan(0.5 * cam.vfov_deg * 0.017453292519943295);

  // Visible clusters, sorted by their distance lower bound.
  std::vector<Candidate> candidates;
  for (std::uint32_t k = 0; k < world.clusters.size(); ++k) {
    const PlantCluster& cl = world.clusters[k];
    const Vec3 dc = cl.bound_center - pose.origin;
    const double dist = dc.norm();
    if (dist - cl.bound_radius > cam.max_range) continue;
    if (dc.dot(pose.forward) < -cl.bound_radius) continue;  // fully behind
    candidates.push_back({k, static_cast<float>(std::max(0.0, dist - cl.bound_radius))});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.t_lower < b.t_lower; });

  // Bucket candidates by the image columns their bound can cover. The
  // azimuth interval of a sphere seen from the origin is exact, so this
  // culls nothing that a ray could hit.
  const double u_edge = (w / 2.0) / fx;
  std::vector<std::vector<std::uint32_t>> columns(w);
  for (std::uint32_t ci = 0; ci < candidates.size(); ++ci) {
    const PlantCluster& cl = world.clusters[candidates[ci].cluster];
    const Vec3 dc = cl.bound_center - pose.origin;
    const double f = dc.dot(pose.forward);
    const double l = dc.dot(pose.left);
    const double rho_h = std::sqrt(f * f + l * l);
    int j_lo = 0, j_hi = w - 1;
    if (rho_h > cl.bound_radius && f > 0.0) {
      const double az_c = std::atan2(-l, f);
      const double az_r = std::asin(std::min(1.0, cl.bound_radius / rho_h));
      const double az_lo = az_c - az_r, az_hi = az_c + az_r;
      if (az_lo >= 1.45 || az_hi <= -1.45) {
        j_lo = 1;
        j_hi = 0;  // outside any plausible field of view
      } else {
        const double u_lo = std::max(-u_edge, std::tan(std::max(az_lo, -1.45)));
        const double u_hi = std::min(u_edge, std::tan(std::min(az_hi, 1.45)));
        j_lo = std::max(0, static_cast<int>(std::floor(u_lo * fx + w / 2.0 - 0.5)) - 1);
        j_hi = std::min(w - 1, static_cast<int>(std::ceil(u_hi * fx + w / 2.0 - 0.5)) + 1);
      }
    }
    // f <= 0 with the origin outside the bound keeps the full column range;
    // such clusters sit beside the camera and only edge rays can reach them.
    for (int j = j_lo; j <= j_hi; ++j) columns[j].push_back(ci);
  }

  Ray ray;
  ray.origin = pose.origin;
  for (int j = 0; j < w; ++j) {
    const double u = (j + 0.5 - w / 2.0) / fx;
    const auto& cand_idx = columns[j];
    for (int i = 0; i < h; ++i) {
      const double v = (i + 0.5 - h / 2.0) / fy;
      ray.dir = (pose.forward - pose.left * u - pose.up * v).normalized();

      double t_ground = std::numeric_limits<double>::infinity();
      if (ray.dir.z < -1e-12 && ray.origin.z > 0.0) t_ground = -ray.origin.z / ray.dir.z;

      double best = t_ground;
      bool plant = false;
      for (const std::uint32_t ci : cand_idx) {
        const Candidate& cand = candidates[ci];
        if (cand.t_lower >= best || cand.t_lower >= cam.max_range) break;
        const PlantCluster& cl = world.clusters[cand.cluster];
        if (!hits_bound(ray, cl.bound_center, cl.bound_radius, best)) continue;
        for (std::uint32_t pi = cl.first; pi < cl.first + cl.count; ++pi) {
          const double t = hit_primitive(ray, world.primitives[pi]);
          if (t > 0.0 && t < best) {
            best = t;
            plant = true;
          }
        }
      }

      if (plant && best < cam.max_range) {
        frame.mask.at(i, j) = 1;
        frame.depth.at(i, j) = best;
      } else if (!plant && best <= cam.max_range && std::isfinite(best)) {
        frame.depth.at(i, j) = best;  // ground return
      }
    }
  }
  return frame;
}

}  // namespace rownav
