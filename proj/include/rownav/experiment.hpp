#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rownav/camera.hpp"
#include "rownav/controller.hpp"
#include "rownav/episode.hpp"
#include "rownav/metrics.hpp"
#include "rownav/perception.hpp"
#include "rownav/world.hpp"

namespace rownav {

/// Raised for malformed or schema-violating experiment files. The message
/// carries the location (line/column or JSON path) of the offending input.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentEntry {
  std::string label;
  WorldConfig world;
  std::vector<Variant> variants;
  PerceptionConfig perception;
  ControllerConfig controller;
  CameraModel camera;
  EpisodeOptions options;
};

struct ExperimentSpec {
  int schema_version = 1;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds;
  bool debug_frames = false;
  std::vector<ExperimentEntry> entries;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::string& origin);
ExperimentSpec load_experiment_spec(const std::string& path);

/// One concrete episode of the experiment grid, with all randomness derived
/// from (seed, label): adding variants or entries never changes the worlds
/// or noise other episodes see.
struct EpisodeJob {
  std::string label;
  Variant variant = Variant::SegMin;
  std::uint64_t seed = 0;
  WorldConfig world;
  PerceptionConfig perception;
  ControllerConfig controller;
  CameraModel camera;
  EpisodeOptions options;

  std::string dir_name() const;
};

std::vector<EpisodeJob> expand(const ExperimentSpec& spec);

struct ExperimentOutcome {
  bool all_completed = true;
  std::vector<std::pair<std::string, RunSummary>> summaries;  // "label,variant" -> summary
  std::string summary_csv_path;
};

/// Runs the full grid sequentially and deterministically; writes per-episode
/// trajectory/command CSVs, metrics and config snapshots, plus one summary
/// CSV laid out world x method. output_root prefixes a relative output_dir.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& output_root = "");

/// The per-crop depth threshold defaults (5 m vineyards, 8 m pear/pergola,
/// 10 m tall trees).
double default_depth_threshold(Crop crop);

/// Built-in benchmark grid: the four crops plus a curved vineyard, SegMin
/// and SegMinD everywhere, SegZeros on the two vineyard tracks.
ExperimentSpec default_experiment_spec();

}  // namespace rownav
