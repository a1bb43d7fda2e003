#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "rownav/bench.hpp"
#include "rownav/experiment.hpp"
#include "rownav/fixtures.hpp"
#include "rownav/pgm.hpp"
#include "rownav/world.hpp"

namespace fs = std::filesystem;

namespace {

std::string output_root() {
  const char* root = std::getenv("ROWNAV_OUT_ROOT");
  return root ? root : "";
}

int cmd_run(const std::string& spec_path, bool debug_frames) {
  rownav::ExperimentSpec spec;
  try {
    spec = rownav::load_experiment_spec(spec_path);
  } catch (const rownav::SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  }
  if (debug_frames) spec.debug_frames = true;

  const auto jobs = rownav::expand(spec);
  std::cout << "running " << jobs.size() << " episodes\n";
  const rownav::ExperimentOutcome outcome = rownav::run_experiment(spec, output_root());
  for (const auto& [key, summary] : outcome.summaries) {
    std::printf("%-40s runs=%d completed=%d mae=%.3f m clearance=%.2f s\n", key.c_str(),
                summary.runs, summary.completed_runs, summary.mae.mean,
                summary.clearance_time.mean);
  }
  std::cout << "summary: " << outcome.summary_csv_path << "\n";
  return outcome.all_completed ? 0 : 1;
}

int cmd_oracle(const std::string& dir) {
  rownav::OracleCheckResult result;
  try {
    result = rownav::check_fixtures_against_oracle(dir);
  } catch (const rownav::SpecError& e) {
    std::cerr << "fixture error: " << e.what() << "\n";
    return 2;
  }
  if (result.ok) {
    std::cout << "oracle check passed on " << result.cases_checked << " cases\n";
    return 0;
  }
  std::cerr << "oracle mismatch at " << result.first_mismatch << "\n";
  return 1;
}

int cmd_bench(int samples, const std::string& out_path) {
  const rownav::BenchReport report = rownav::run_benchmark(samples);
  const std::string csv = rownav::bench_report_csv(report);
  std::cout << csv;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << csv;
  }
  if (!report.within_budget) {
    std::cerr << "perceive p99 exceeds the " << report.perceive_budget_ms << " ms budget\n";
    return 1;
  }
  return 0;
}

int cmd_gen_world(const std::string& crop_name_str, std::uint64_t seed, double curvature,
                  const std::string& out_dir) {
  rownav::WorldConfig cfg;
  try {
    cfg = rownav::WorldConfig::for_crop(rownav::crop_from_name(crop_name_str), seed, curvature);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const rownav::World world = rownav::generate_world(cfg);

  fs::path dir(out_dir.empty() ? std::string("out/worlds") : out_dir);
  if (!output_root().empty() && dir.is_relative()) dir = fs::path(output_root()) / dir;
  fs::create_directories(dir);

  const std::string stem = crop_name_str + "_seed" + std::to_string(seed);
  {
    std::ofstream out(dir / (stem + "_plants.csv"));
    out << "x,y,z,kind,rx,ry,rz,z0,z1,yaw\n";
    char buf[256];
    for (const rownav::Primitive& p : world.primitives) {
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.5f\n",
                    p.center.x, p.center.y, p.center.z,
                    p.kind == rownav::Primitive::Kind::Ellipsoid ? "ellipsoid" : "cylinder",
                    p.radii.x, p.radii.y, p.radii.z, p.z0, p.z1, p.yaw);
      out << buf;
    }
  }
  {
    std::ofstream out(dir / (stem + "_centerline.csv"));
    out << "x,y\n";
    char buf[80];
    for (const rownav::Vec2& p : rownav::ground_truth_centerline(world).points()) {
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f\n", p.x, p.y);
      out << buf;
    }
  }
  std::cout << "wrote " << world.primitives.size() << " primitives to " << (dir / stem).string()
            << "_*.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rownav - crop-row navigation simulation and benchmarking"};
  app.require_subcommand(1);

  std::string spec_path;
  bool debug_frames = false;
  auto* run = app.add_subcommand("run", "run an experiment spec end to end");
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
  run->add_flag("--debug-frames", debug_frames, "dump every rendered frame as PGM");

  std::string fixture_dir;
  auto* oracle = app.add_subcommand("oracle", "check fixtures against the brute-force pipeline");
  oracle->add_option("dir", fixture_dir, "fixture directory")->required();

  int bench_samples = 200;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "per-stage latency report");
  bench->add_option("--frames", bench_samples, "timed frames per stage");
  bench->add_option("--out", bench_out, "also write the CSV report here");

  std::string crop;
  std::uint64_t seed = 0;
  double curvature = 0.0;
  std::string world_out;
  auto* gen = app.add_subcommand("gen-world", "generate a world and export its layout as CSV");
  gen->add_option("crop", crop,
                  "common_vineyard | pergola_vineyard | pear_field | high_trees_field")
      ->required();
  gen->add_option("--seed", seed, "jitter seed");
  gen->add_option("--curvature", curvature, "row curvature in 1/m (0 = straight)");
  gen->add_option("-o,--out", world_out, "output directory");

  std::string fixtures_dir;
  std::uint64_t fixtures_seed = 42;
  auto* make = app.add_subcommand("make-fixtures", "generate a pipeline fixture set");
  make->add_option("dir", fixtures_dir, "output directory")->required();
  make->add_option("--seed", fixtures_seed, "fixture seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path, debug_frames);
    if (oracle->parsed()) return cmd_oracle(fixture_dir);
    if (bench->parsed()) return cmd_bench(bench_samples, bench_out);
    if (gen->parsed()) return cmd_gen_world(crop, seed, curvature, world_out);
    if (make->parsed()) {
      rownav::make_fixtures(fixtures_dir, fixtures_seed);
      std::cout << "fixtures written to " << fixtures_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
