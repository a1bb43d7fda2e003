// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Episode-based criteria share their runs through a lazy cache so the
// high-trees runs feed both the trend check and the clearance bounds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rownav/bench.hpp"
#include "rownav/controller.hpp"
#include "rownav/episode.hpp"
#include "rownav/experiment.hpp"
#include "rownav/metrics.hpp"
#include "rownav/perception.hpp"
#include "rownav/pipeline_oracle.hpp"
#include "rownav/rng.hpp"
#include "test_support.hpp"

using namespace rownav;
namespace fs = std::filesystem;

using test_support::random_depth;
using test_support::random_mask;
using test_support::to_oracle;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[criterion %d] %s - %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

struct EpisodeRecord {
  EpisodeMetrics metrics;
  double min_travel = 0.0;  // straight-line distance from start to the end line
  bool curved = false;
};

struct RunBatch {
  std::vector<EpisodeRecord> records;
  std::vector<double> mae;        // per seed-order
  std::vector<double> clearance;
  std::vector<double> omega_std;
  int stop_events = 0;
  bool all_completed = true;
  double wall_seconds = 0.0;
};

// Distance from the start point to the end line (the transverse line the
// clearance clock stops at). Equals track_length on straight tracks.
double min_travel_distance(const World& world) {
  const Polyline& line = ground_truth_centerline(world);
  const Vec2 start = line.point_at(0.0);
  const Vec2 end = line.point_at(world.config.track_length);
  const double tangent = line.heading_at(world.config.track_length - 1e-6);
  const Vec2 dir{std::cos(tangent), std::sin(tangent)};
  return std::abs((start - end).dot(dir));
}

RunBatch run_batch(Crop crop, double curvature, Variant variant, const char* tag,
                   double mask_noise, double depth_noise) {
  const auto t0 = std::chrono::steady_clock::now();
  RunBatch batch;
  for (std::uint64_t seed : {1, 2, 3}) {
    WorldConfig cfg = WorldConfig::for_crop(crop, derive_seed(seed, std::string(tag) + "/world"),
                                            curvature);
    const World world = generate_world(cfg);

    PerceptionConfig perception;
    perception.depth_threshold = default_depth_threshold(crop);
    perception.variant = variant;

    EpisodeOptions options;
    options.mask_noise_prob = mask_noise;
    options.depth_noise_sigma = depth_noise;
    options.noise_seed = derive_seed(seed, std::string(tag) + "/noise");

    const EpisodeResult result = run_episode(world, {}, perception, {}, {}, options);
    const EpisodeMetrics metrics = compute_metrics(result, ground_truth_centerline(world));

    EpisodeRecord record;
    record.metrics = metrics;
    record.min_travel = min_travel_distance(world);
    record.curved = curvature != 0.0;
    batch.records.push_back(record);
    batch.mae.push_back(metrics.mae);
    batch.clearance.push_back(metrics.clearance_time);
    batch.omega_std.push_back(metrics.omega_stddev);
    batch.stop_events += metrics.stop_events;
    batch.all_completed = batch.all_completed && metrics.completed;
  }
  batch.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return batch;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

// Shared episode cache. The vineyard and high-trees batches run on clean
// oracle frames; the curved baseline comparison uses the documented 0.2%
// mask classification error, the regime the zero-run method is fragile in.
struct Batches {
  RunBatch vineyard_segmin, vineyard_segmind;
  RunBatch trees_segmin, trees_segmind;
  RunBatch curved_segmin, curved_segzeros;
};

const Batches& batches() {
  static const Batches b = [] {
    Batches out;
    out.vineyard_segmin = run_batch(Crop::CommonVineyard, 0.0, Variant::SegMin, "c3", 0.0, 0.0);
    out.vineyard_segmind = run_batch(Crop::CommonVineyard, 0.0, Variant::SegMinD, "c3", 0.0, 0.0);
    out.trees_segmin = run_batch(Crop::HighTreesField, 0.0, Variant::SegMin, "c4", 0.0, 0.0);
    out.trees_segmind = run_batch(Crop::HighTreesField, 0.0, Variant::SegMinD, "c4", 0.0, 0.0);
    out.curved_segmin =
        run_batch(Crop::CommonVineyard, 0.05, Variant::SegMin, "c5", 0.002, 0.0);
    out.curved_segzeros =
        run_batch(Crop::CommonVineyard, 0.05, Variant::SegZeros, "c5", 0.002, 0.0);
    return out;
  }();
  return b;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr double kTol = 1e-9;

}  // namespace

TEST_CASE("criterion 1: pipeline stages match the brute-force oracle") {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  int checked = 0;
  bool ok = true;
  std::string first_fail;

  auto mismatch = [&](const char* stage, int rep) {
    ok = false;
    if (first_fail.empty()) first_fail = std::string(stage) + " at pair " + std::to_string(rep);
  };

  for (int rep = 0; rep < 1000; ++rep) {
    const int w = 8 + static_cast<int>(rng.below(217));  // 8..224
    const int h = 8 + static_cast<int>(rng.below(217));
    const int frames = 1 + static_cast<int>(rng.below(3));
    const double d_th = rng.uniform(1.0, 11.0);
    int window = 1 + 2 * static_cast<int>(rng.below(8));
    if (window > w) window = w % 2 ? w : w - 1;

    MaskBuffer buffer(frames);
    std::vector<oracle::GridData> o_masks;
    for (int k = 0; k < frames; ++k) {
      const VegetationMask m = random_mask(rng, w, h, rng.uniform(0.05, 0.7));
      buffer.push(m);
      o_masks.push_back(to_oracle(m));
    }
    const DepthImage depth = random_depth(rng, w, h, d_th);
    const oracle::GridData o_depth = to_oracle(depth);

    const VegetationMask fused = fuse_masks(buffer);
    const oracle::GridData o_fused = oracle::fuse_masks(o_masks);
    for (int i = 0; i < h && ok; ++i) {
      for (int j = 0; j < w; ++j) {
        if (std::abs(fused.at(i, j) - o_fused.at(i, j)) > kTol) {
          mismatch("fuse", rep);
          break;
        }
      }
    }

    const VegetationMask gated = gate_by_depth(fused, depth, d_th);
    const oracle::GridData o_gated = oracle::gate_by_depth(o_fused, o_depth, d_th);
    for (int i = 0; i < h && ok; ++i) {
      for (int j = 0; j < w; ++j) {
        if (std::abs(gated.at(i, j) - o_gated.at(i, j)) > kTol) {
          mismatch("gate", rep);
          break;
        }
      }
    }

    const WeightedImage weighted = weight_by_inverse_depth(gated, depth, d_th);
    const oracle::GridData o_weighted = oracle::weight_by_inverse_depth(o_gated, o_depth, d_th);
    for (int i = 0; i < h && ok; ++i) {
      for (int j = 0; j < w; ++j) {
        if (std::abs(weighted.at(i, j) - o_weighted.at(i, j)) > kTol) {
          mismatch("weight", rep);
          break;
        }
      }
    }

    const ColumnHistogram hist = column_histogram(gated);
    const std::vector<double> o_hist = oracle::column_histogram(o_gated);
    for (int j = 0; j < w && ok; ++j) {
      if (std::abs(hist[j] - o_hist[j]) > kTol) mismatch("histogram", rep);
    }

    const ColumnHistogram smooth = smooth_histogram(hist, window);
    const std::vector<double> o_smooth = oracle::smooth_histogram(o_hist, window);
    for (int j = 0; j < w && ok; ++j) {
      if (std::abs(smooth[j] - o_smooth[j]) > kTol) mismatch("smooth", rep);
    }

    if (std::abs(find_row_center(smooth) - oracle::find_row_center(o_smooth)) > kTol) {
      mismatch("argmin", rep);
    }

    const auto zeros = segzeros_center(gated);
    const auto o_zeros = oracle::segzeros_center(o_gated);
    if (zeros.has_value() != o_zeros.has_value() ||
        (zeros && std::abs(*zeros - *o_zeros) > kTol)) {
      mismatch("segzeros", rep);
    }
    ++checked;
    if (!ok) break;
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count();
  const bool in_time = elapsed < 60.0;
  char detail[200];
  if (first_fail.empty()) {
    std::snprintf(detail, sizeof(detail), "%d random pairs, all stages within 1e-9, %.1f s%s",
                  checked, elapsed, in_time ? "" : " (over budget)");
  } else {
    std::snprintf(detail, sizeof(detail), "mismatch at %s after %d pairs", first_fail.c_str(),
                  checked);
  }
  report(1, ok && in_time, detail);
  CHECK(ok);
  CHECK(in_time);
}

TEST_CASE("criterion 2: controller law reproduces the published constants") {
  const ControllerConfig cfg;  // v_max 0.5, gain 0.01, omega_max 1, w 224
  bool ok = true;

  const VelocityCommand centered = compute_command(0.0, cfg);
  ok = ok && centered.v_x == 0.5 && centered.omega_z == 0.0;

  for (int k = 0; k < 100; ++k) {
    const double d = -112.0 + 224.0 * k / 99.0;
    const VelocityCommand cmd = compute_command(d, cfg);
    if (std::abs(cmd.omega_z - std::clamp(-0.01 * d, -1.0, 1.0)) > 0.0) ok = false;
    const double expect_v = std::clamp(0.5 * (1.0 - d * d / (112.0 * 112.0)), 0.0, 0.5);
    if (cmd.v_x != expect_v) ok = false;
  }

  // clamps at and beyond the frame edge
  ok = ok && compute_command(112.0, cfg).v_x == 0.0;
  ok = ok && compute_command(-112.0, cfg).v_x == 0.0;
  ok = ok && compute_command(300.0, cfg).v_x == 0.0;
  ok = ok && compute_command(300.0, cfg).omega_z == -1.0;
  ok = ok && compute_command(-300.0, cfg).omega_z == 1.0;

  report(2, ok, "v(0)=0.5 m/s, omega=-0.01*d exact over 100 samples, clamps at |d|>=112");
  CHECK(ok);
}

TEST_CASE("criterion 3: straight vineyard tracking") {
  const RunBatch& segmin = batches().vineyard_segmin;
  const RunBatch& segmind = batches().vineyard_segmind;
  const double wall = segmin.wall_seconds + segmind.wall_seconds;

  bool ok = segmin.all_completed && segmind.all_completed;
  for (const RunBatch* b : {&segmin, &segmind}) {
    for (std::size_t i = 0; i < b->records.size(); ++i) {
      ok = ok && b->mae[i] <= 0.20;
      ok = ok && b->clearance[i] >= 40.0 - kTol && b->clearance[i] <= 55.0;
    }
  }
  const bool in_time = wall < 300.0;

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "segmin mae %.3f m clr %.2f s | segmind mae %.3f m clr %.2f s | %.0f s wall",
                mean(segmin.mae), mean(segmin.clearance), mean(segmind.mae),
                mean(segmind.clearance), wall);
  report(3, ok && in_time, detail);
  CHECK(ok);
  CHECK(in_time);
}

TEST_CASE("criterion 4: wide-canopy trend (SegMinD <= SegMin on high trees)") {
  const RunBatch& segmin = batches().trees_segmin;
  const RunBatch& segmind = batches().trees_segmind;

  const bool completed = segmin.all_completed && segmind.all_completed;
  const bool ordered = mean(segmind.mae) <= mean(segmin.mae);

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "segmind mean mae %.4f m <= segmin mean mae %.4f m, all %scompleted",
                mean(segmind.mae), mean(segmin.mae), completed ? "" : "NOT ");
  report(4, completed && ordered, detail);
  CHECK(completed);
  CHECK(ordered);
}

TEST_CASE("criterion 5: SegZeros degradation on the curved vineyard") {
  const RunBatch& segmin = batches().curved_segmin;
  const RunBatch& segzeros = batches().curved_segzeros;

  const bool completed = segmin.all_completed && segzeros.all_completed;
  const bool slower = mean(segzeros.clearance) >= mean(segmin.clearance);
  const bool stops_or_oscillation =
      segzeros.stop_events >= 1 || mean(segzeros.omega_std) > mean(segmin.omega_std);

  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "clearance %.2f s >= %.2f s; stop events %d; omega_stddev %.4f vs %.4f rad/s",
                mean(segzeros.clearance), mean(segmin.clearance), segzeros.stop_events,
                mean(segzeros.omega_std), mean(segmin.omega_std));
  report(5, completed && slower && stops_or_oscillation, detail);
  CHECK(completed);
  CHECK(slower);
  CHECK(stops_or_oscillation);
}

TEST_CASE("criterion 6: kinematic lower bound on clearance times") {
  const Batches& b = batches();
  bool ok = true;
  int episodes = 0;

  for (const RunBatch* batch : {&b.vineyard_segmin, &b.vineyard_segmind, &b.trees_segmin,
                                &b.trees_segmind, &b.curved_segmin, &b.curved_segzeros}) {
    for (const EpisodeRecord& r : batch->records) {
      if (!r.metrics.completed) continue;
      ++episodes;
      // straight tracks: the plain bound track_length/v_max = 40 s holds
      // as-is; on the curved track the end line is geometrically nearer, so
      // the defensible bound is start-to-end-line distance over v_max.
      const double bound = r.curved ? r.min_travel / 0.5 : 40.0;
      if (r.metrics.clearance_time < bound - 1e-6) ok = false;
    }
  }

  // centered-start high-trees clearance within 15% of the published 40.4 s
  bool trees_close = true;
  for (const RunBatch* batch : {&b.trees_segmin, &b.trees_segmind}) {
    for (const EpisodeRecord& r : batch->records) {
      if (std::abs(r.metrics.clearance_time - 40.4) > 0.15 * 40.4) trees_close = false;
    }
  }

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "%d completed episodes >= bound; high-trees clearance %.2f s within 15%% of 40.4",
                episodes, mean(b.trees_segmin.clearance));
  report(6, ok && trees_close && episodes > 0, detail);
  CHECK(ok);
  CHECK(trees_close);
  CHECK(episodes > 0);
}

TEST_CASE("criterion 7: invariant property suites, 500 cases each") {
  Rng rng(1007);
  int mirror_fail = 0, scale_fail = 0, ema_fail = 0, fusion_fail = 0;

  // mirror symmetry of the full perception pipeline
  for (int rep = 0; rep < 500; ++rep) {
    const int w = 6 + static_cast<int>(rng.below(64));
    const int h = 4 + static_cast<int>(rng.below(32));
    MaskBuffer buf(2), flipped(2);
    for (int k = 0; k < 2; ++k) {
      const VegetationMask m = random_mask(rng, w, h, rng.uniform(0.1, 0.5));
      buf.push(m);
      flipped.push(flip_horizontal(m));
    }
    const DepthImage depth = random_depth(rng, w, h);
    PerceptionConfig cfg;
    cfg.history = 2;
    cfg.smoothing_window = std::min(2 * static_cast<int>(rng.below(4)) + 1, w % 2 ? w : w - 1);
    cfg.variant = static_cast<Variant>(rng.below(3));
    const auto a = perceive(buf, depth, cfg);
    const auto m = perceive(flipped, flip_horizontal(depth), cfg);
    if (a.has_value() != m.has_value()) ++mirror_fail;
    if (a && m && std::abs(*m - ((w - 1) - *a)) > 1e-9) ++mirror_fail;
  }

  // positive-scale argmin invariance
  for (int rep = 0; rep < 500; ++rep) {
    const int w = 2 + static_cast<int>(rng.below(120));
    ColumnHistogram hist(w);
    for (auto& v : hist) v = rng.uniform(0.0, 20.0);
    ColumnHistogram scaled = hist;
    const double s = rng.uniform(0.01, 50.0);
    for (auto& v : scaled) v *= s;
    if (std::abs(find_row_center(hist) - find_row_center(scaled)) > 1e-9) ++scale_fail;
  }

  // EMA output is a componentwise convex combination
  for (int rep = 0; rep < 500; ++rep) {
    CommandFilterState state;
    const VelocityCommand first{rng.uniform(0.0, 0.5), rng.uniform(-1.0, 1.0)};
    ema_filter(state, first, 0.5);
    const VelocityCommand prev = state.previous;
    const VelocityCommand next{rng.uniform(0.0, 0.5), rng.uniform(-1.0, 1.0)};
    const VelocityCommand out = ema_filter(state, next, rng.uniform(0.05, 1.0));
    if (out.v_x < std::min(prev.v_x, next.v_x) - 1e-12 ||
        out.v_x > std::max(prev.v_x, next.v_x) + 1e-12 ||
        out.omega_z < std::min(prev.omega_z, next.omega_z) - 1e-12 ||
        out.omega_z > std::max(prev.omega_z, next.omega_z) + 1e-12) {
      ++ema_fail;
    }
  }

  // OR-fusion monotonicity: fused mask contains every input
  for (int rep = 0; rep < 500; ++rep) {
    const int w = 3 + static_cast<int>(rng.below(40));
    const int h = 2 + static_cast<int>(rng.below(30));
    const int frames = 1 + static_cast<int>(rng.below(4));
    MaskBuffer buf(frames);
    std::vector<VegetationMask> inputs;
    for (int k = 0; k < frames; ++k) {
      inputs.push_back(random_mask(rng, w, h, rng.uniform(0.0, 0.6)));
      buf.push(inputs.back());
    }
    const VegetationMask fused = fuse_masks(buf);
    for (const VegetationMask& in : inputs) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          if (fused.at(i, j) < in.at(i, j)) ++fusion_fail;
        }
      }
    }
  }

  const bool ok = mirror_fail == 0 && scale_fail == 0 && ema_fail == 0 && fusion_fail == 0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "mirror %d/500 fail, scale %d/500, ema %d/500, fusion %d/500",
                mirror_fail, scale_fail, ema_fail, fusion_fail);
  report(7, ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 8: byte-identical summaries across consecutive runs") {
  const fs::path dir = fs::temp_directory_path() / "rownav_accept_det";
  fs::remove_all(dir);

  ExperimentSpec spec = parse_experiment_spec(R"({
    "schema_version": 1,
    "output_dir": "run",
    "seeds": [11, 12],
    "episodes": [
      {"label": "det", "world": {"crop": "common_vineyard", "track_length": 6.0},
       "variants": ["segmin", "segzeros"],
       "options": {"mask_noise_prob": 0.002}}
    ]
  })",
                                              "acceptance");

  spec.output_dir = (dir / "a").string();
  run_experiment(spec);
  spec.output_dir = (dir / "b").string();
  run_experiment(spec);

  const std::string sa = read_file(dir / "a" / "summary.csv");
  const std::string sb = read_file(dir / "b" / "summary.csv");
  const bool summaries_match = !sa.empty() && sa == sb;
  const std::string ta = read_file(dir / "a" / "det__segzeros__seed11" / "trajectory.csv");
  const std::string tb = read_file(dir / "b" / "det__segzeros__seed11" / "trajectory.csv");
  const bool trajectories_match = !ta.empty() && ta == tb;

  char detail[160];
  std::snprintf(detail, sizeof(detail), "summary.csv %zu bytes identical, trajectories identical",
                sa.size());
  report(8, summaries_match && trajectories_match, detail);
  CHECK(summaries_match);
  CHECK(trajectories_match);
}

TEST_CASE("criterion 9: perception fits the 20 Hz inference budget") {
  const BenchReport bench = run_benchmark(150);
  const BenchStage& perceive_stage = bench.stages[1];

  char detail[160];
  std::snprintf(detail, sizeof(detail), "perceive p50 %.2f ms, p99 %.2f ms (budget %.0f ms)",
                perceive_stage.p50_ms, perceive_stage.p99_ms, bench.perceive_budget_ms);
  report(9, bench.within_budget, detail);
  CHECK(bench.within_budget);
}
