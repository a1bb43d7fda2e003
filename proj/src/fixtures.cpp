#include "rownav/fixtures.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "rownav/camera.hpp"
#include "rownav/experiment.hpp"
#include "rownav/perception.hpp"
#include "rownav/pgm.hpp"
#include "rownav/pipeline_oracle.hpp"
#include "rownav/render.hpp"
#include "rownav/rng.hpp"
#include "rownav/world.hpp"

namespace rownav {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

VegetationMask random_mask(Rng& rng, int w, int h, double density) {
  VegetationMask m(w, h);
  for (auto& c : m.cells()) c = rng.uniform() < density ? 1 : 0;
  return m;
}

DepthImage random_depth(Rng& rng, int w, int h, double d_th) {
  DepthImage d(w, h);
  for (auto& c : d.cells()) {
    c = rng.uniform() < 0.1 ? kNoReturnDepth : rng.uniform(0.0, 2.0 * d_th);
  }
  return d;
}

oracle::GridData to_oracle(const VegetationMask& m) {
  oracle::GridData g{m.width(), m.height(), {}};
  g.cells.assign(m.cells().begin(), m.cells().end());
  return g;
}

oracle::GridData to_oracle(const DepthImage& d) {
  return {d.width(), d.height(), d.cells()};
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9; }

bool grids_close(const VegetationMask& m, const oracle::GridData& g) {
  for (int i = 0; i < m.height(); ++i) {
    for (int j = 0; j < m.width(); ++j) {
      if (!close(static_cast<double>(m.at(i, j)), g.at(i, j))) return false;
    }
  }
  return true;
}

bool grids_close(const WeightedImage& m, const oracle::GridData& g) {
  for (int i = 0; i < m.height(); ++i) {
    for (int j = 0; j < m.width(); ++j) {
      if (!close(m.at(i, j), g.at(i, j))) return false;
    }
  }
  return true;
}

bool vectors_close(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

void make_fixtures(const std::string& dir, std::uint64_t seed) {
  fs::create_directories(dir);
  Rng rng(derive_seed(seed, "fixtures"));
  json manifest;
  manifest["schema_version"] = 1;
  json cases = json::array();

  int case_id = 0;
  auto add_case = [&](const std::vector<VegetationMask>& masks, const DepthImage& depth,
                      double d_th, int window, int history) {
    char name[32];
    std::snprintf(name, sizeof(name), "case%03d", case_id++);
    json entry;
    entry["name"] = name;
    json mask_files = json::array();
    for (std::size_t k = 0; k < masks.size(); ++k) {
      const std::string file = std::string(name) + "_mask" + std::to_string(k) + ".pgm";
      write_mask_pgm((fs::path(dir) / file).string(), masks[k]);
      mask_files.push_back(file);
    }
    const std::string depth_file = std::string(name) + "_depth.pgm";
    write_depth_pgm((fs::path(dir) / depth_file).string(), depth);
    entry["masks"] = mask_files;
    entry["depth"] = depth_file;
    entry["depth_threshold"] = d_th;
    entry["smoothing_window"] = window;
    entry["history"] = history;
    cases.push_back(entry);
  };

  // Small random grids across a spread of sizes and densities.
  const int sizes[] = {8, 16, 31, 64};
  for (int s : sizes) {
    const double d_th = 5.0;
    std::vector<VegetationMask> masks;
    const int history = 3;
    for (int k = 0; k < history; ++k) masks.push_back(random_mask(rng, s, s, 0.3));
    add_case(masks, random_depth(rng, s, s, d_th), d_th, std::min(2 * (s / 4) + 1, 15), history);
  }

  // Two rendered frames: a vineyard and a high-trees scene at full size.
  for (const Crop crop : {Crop::CommonVineyard, Crop::HighTreesField}) {
    const World world = generate_world(WorldConfig::for_crop(crop, seed + case_id));
    const CameraModel cam;
    RobotPose pose;
    const Vec2 start = ground_truth_centerline(world).point_at(0.5);
    pose.x = start.x;
    pose.y = start.y;
    pose.z = terrain_height(world, pose.x, pose.y);
    const FrameObservation frame = render(world, camera_pose_on_terrain(pose, cam, world), cam);
    add_case({frame.mask}, frame.depth, default_depth_threshold(crop), 15, 1);
  }

  std::ofstream mf(fs::path(dir) / "manifest.json");
  manifest["cases"] = cases;
  mf << manifest.dump(2) << '\n';
}

OracleCheckResult check_fixtures_against_oracle(const std::string& dir) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw SpecError(dir + ": no manifest.json (empty or not a fixture directory)");
  }
  json manifest;
  try {
    std::ifstream in(manifest_path);
    std::stringstream buf;
    buf << in.rdbuf();
    manifest = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SpecError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("cases") || !manifest.at("cases").is_array() ||
      manifest.at("cases").empty()) {
    throw SpecError(manifest_path.string() + ": manifest has no cases");
  }

  OracleCheckResult result;
  result.ok = true;
  for (const auto& entry : manifest.at("cases")) {
    std::string name;
    std::vector<VegetationMask> masks;
    DepthImage depth;
    double d_th = 0.0;
    int window = 0, history = 0;
    try {
      name = entry.at("name").get<std::string>();
      for (const auto& f : entry.at("masks")) {
        masks.push_back(read_mask_pgm((fs::path(dir) / f.get<std::string>()).string()));
      }
      depth = read_depth_pgm((fs::path(dir) / entry.at("depth").get<std::string>()).string());
      d_th = entry.at("depth_threshold").get<double>();
      window = entry.at("smoothing_window").get<int>();
      history = entry.at("history").get<int>();
    } catch (const std::exception& e) {
      throw SpecError(manifest_path.string() + ": corrupt case: " + e.what());
    }

    MaskBuffer buffer(history);
    std::vector<oracle::GridData> oracle_masks;
    for (const VegetationMask& m : masks) {
      buffer.push(m);
      oracle_masks.push_back(to_oracle(m));
    }
    const oracle::GridData oracle_depth = to_oracle(depth);

    auto mismatch = [&](const std::string& stage) {
      if (result.ok) result.first_mismatch = name + "/" + stage;
      result.ok = false;
    };

    const VegetationMask fused = fuse_masks(buffer);
    const oracle::GridData o_fused = oracle::fuse_masks(oracle_masks);
    if (!grids_close(fused, o_fused)) mismatch("fuse");

    const VegetationMask gated = gate_by_depth(fused, depth, d_th);
    const oracle::GridData o_gated = oracle::gate_by_depth(o_fused, oracle_depth, d_th);
    if (!grids_close(gated, o_gated)) mismatch("gate");

    const WeightedImage weighted = weight_by_inverse_depth(gated, depth, d_th);
    const oracle::GridData o_weighted =
        oracle::weight_by_inverse_depth(o_gated, oracle_depth, d_th);
    if (!grids_close(weighted, o_weighted)) mismatch("weight");

    const ColumnHistogram hist = column_histogram(gated);
    const std::vector<double> o_hist = oracle::column_histogram(o_gated);
    if (!vectors_close(hist, o_hist)) mismatch("histogram");

    const int win = std::min(window, gated.width() % 2 == 0 ? gated.width() - 1 : gated.width());
    const ColumnHistogram smooth = smooth_histogram(hist, win);
    const std::vector<double> o_smooth = oracle::smooth_histogram(o_hist, win);
    if (!vectors_close(smooth, o_smooth)) mismatch("smooth");

    if (!close(find_row_center(smooth), oracle::find_row_center(o_smooth))) mismatch("argmin");

    const auto zeros = segzeros_center(gated);
    const auto o_zeros = oracle::segzeros_center(o_gated);
    if (zeros.has_value() != o_zeros.has_value() ||
        (zeros && !close(*zeros, *o_zeros))) {
      mismatch("segzeros");
    }

    // End-to-end composition for all three variants.
    for (const Variant variant : {Variant::SegMin, Variant::SegMinD, Variant::SegZeros}) {
      PerceptionConfig cfg;
      cfg.depth_threshold = d_th;
      cfg.smoothing_window = win;
      cfg.history = history;
      cfg.variant = variant;
      const auto lib = perceive(buffer, depth, cfg);
      const auto ref = oracle::perceive(oracle_masks, oracle_depth, d_th, win,
                                        variant_name(variant));
      if (lib.has_value() != ref.has_value() || (lib && !close(*lib, *ref))) {
        mismatch(std::string("perceive-") + variant_name(variant));
      }
    }
    ++result.cases_checked;
  }
  return result;
}

}  // namespace rownav
