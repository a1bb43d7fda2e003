#include "rownav/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rownav/rng.hpp"

namespace rownav {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string line_col_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void fail(const std::string& origin, const std::string& where,
                       const std::string& what) {
  throw SpecError(origin + ": " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& origin, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      fail(origin, where, "unknown key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
T get_field(const json& obj, const char* key, const T& fallback, const std::string& origin,
            const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(origin, where + "." + key, "wrong type");
  }
}

void parse_world(const json& obj, const std::string& origin, const std::string& where,
                 WorldConfig* out) {
  check_keys(obj, origin, where,
             {"crop", "row_distance", "plant_distance", "plant_height", "track_length",
              "curvature", "terrain_roughness", "margin_before", "margin_after", "guard_rows"});
  if (!obj.contains("crop")) fail(origin, where, "missing required key \"crop\"");
  Crop crop;
  try {
    crop = crop_from_name(obj.at("crop").get<std::string>());
  } catch (const std::exception& e) {
    fail(origin, where + ".crop", e.what());
  }
  WorldConfig cfg = WorldConfig::for_crop(crop);
  cfg.row_distance = get_field(obj, "row_distance", cfg.row_distance, origin, where);
  cfg.plant_distance = get_field(obj, "plant_distance", cfg.plant_distance, origin, where);
  cfg.plant_height = get_field(obj, "plant_height", cfg.plant_height, origin, where);
  cfg.track_length = get_field(obj, "track_length", cfg.track_length, origin, where);
  cfg.curvature = get_field(obj, "curvature", cfg.curvature, origin, where);
  cfg.terrain_roughness =
      get_field(obj, "terrain_roughness", cfg.terrain_roughness, origin, where);
  cfg.margin_before = get_field(obj, "margin_before", cfg.margin_before, origin, where);
  cfg.margin_after = get_field(obj, "margin_after", cfg.margin_after, origin, where);
  cfg.guard_rows = get_field(obj, "guard_rows", cfg.guard_rows, origin, where);
  *out = cfg;
}

void parse_perception(const json& obj, const std::string& origin, const std::string& where,
                      PerceptionConfig* out) {
  check_keys(obj, origin, where, {"depth_threshold", "smoothing_window", "history"});
  out->depth_threshold = get_field(obj, "depth_threshold", out->depth_threshold, origin, where);
  out->smoothing_window =
      get_field(obj, "smoothing_window", out->smoothing_window, origin, where);
  out->history = get_field(obj, "history", out->history, origin, where);
}

void parse_controller(const json& obj, const std::string& origin, const std::string& where,
                      ControllerConfig* out) {
  check_keys(obj, origin, where, {"v_max", "omega_max", "omega_gain", "ema_lambda"});
  out->v_max = get_field(obj, "v_max", out->v_max, origin, where);
  out->omega_max = get_field(obj, "omega_max", out->omega_max, origin, where);
  out->omega_gain = get_field(obj, "omega_gain", out->omega_gain, origin, where);
  out->ema_lambda = get_field(obj, "ema_lambda", out->ema_lambda, origin, where);
}

void parse_camera(const json& obj, const std::string& origin, const std::string& where,
                  CameraModel* out) {
  check_keys(obj, origin, where,
             {"width", "height", "hfov_deg", "vfov_deg", "forward_offset", "mount_height",
              "pitch_deg", "max_range"});
  out->width = get_field(obj, "width", out->width, origin, where);
  out->height = get_field(obj, "height", out->height, origin, where);
  out->hfov_deg = get_field(obj, "hfov_deg", out->hfov_deg, origin, where);
  out->vfov_deg = get_field(obj, "vfov_deg", out->vfov_deg, origin, where);
  out->forward_offset = get_field(obj, "forward_offset", out->forward_offset, origin, where);
  out->mount_height = get_field(obj, "mount_height", out->mount_height, origin, where);
  out->pitch_deg = get_field(obj, "pitch_deg", out->pitch_deg, origin, where);
  out->max_range = get_field(obj, "max_range", out->max_range, origin, where);
}

void parse_options(const json& obj, const std::string& origin, const std::string& where,
                   EpisodeOptions* out) {
  check_keys(obj, origin, where,
             {"max_duration", "start_lateral_offset", "start_heading_offset",
              "divergence_lateral", "depth_noise_sigma", "mask_noise_prob"});
  out->max_duration = get_field(obj, "max_duration", out->max_duration, origin, where);
  out->start_lateral_offset =
      get_field(obj, "start_lateral_offset", out->start_lateral_offset, origin, where);
  out->start_heading_offset =
      get_field(obj, "start_heading_offset", out->start_heading_offset, origin, where);
  out->divergence_lateral =
      get_field(obj, "divergence_lateral", out->divergence_lateral, origin, where);
  out->depth_noise_sigma =
      get_field(obj, "depth_noise_sigma", out->depth_noise_sigma, origin, where);
  out->mask_noise_prob =
      get_field(obj, "mask_noise_prob", out->mask_noise_prob, origin, where);
}

bool valid_label(const std::string& label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

std::string fmt_num(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double default_depth_threshold(Crop crop) {
  switch (crop) {
    case Crop::CommonVineyard: return 5.0;
    case Crop::PearField: return 8.0;
    case Crop::PergolaVineyard: return 8.0;
    case Crop::HighTreesField: return 10.0;
  }
  return 5.0;
}

ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(origin + ": " + line_col_of(json_text, e.byte) + ": " + e.what());
  }
  if (!root.is_object()) fail(origin, "$", "top level must be an object");
  check_keys(root, origin, "$",
             {"schema_version", "output_dir", "seeds", "debug_frames", "episodes"});

  ExperimentSpec spec;
  if (!root.contains("schema_version")) fail(origin, "$", "missing \"schema_version\"");
  spec.schema_version = get_field(root, "schema_version", 0, origin, "$");
  if (spec.schema_version != 1) {
    fail(origin, "$.schema_version", "unsupported schema version (expected 1)");
  }
  spec.output_dir = get_field<std::string>(root, "output_dir", "out", origin, "$");
  spec.debug_frames = get_field(root, "debug_frames", false, origin, "$");

  if (!root.contains("seeds") || !root.at("seeds").is_array() || root.at("seeds").empty()) {
    fail(origin, "$.seeds", "need a non-empty array of integer seeds");
  }
  std::set<std::uint64_t> seen;
  for (const auto& s : root.at("seeds")) {
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      fail(origin, "$.seeds", "seeds must be integers");
    }
    const std::uint64_t v = s.get<std::uint64_t>();
    if (!seen.insert(v).second) fail(origin, "$.seeds", "seeds must be distinct");
    spec.seeds.push_back(v);
  }

  if (!root.contains("episodes") || !root.at("episodes").is_array() ||
      root.at("episodes").empty()) {
    fail(origin, "$.episodes", "need a non-empty array of episode entries");
  }
  int idx = 0;
  for (const auto& e : root.at("episodes")) {
    const std::string where = "$.episodes[" + std::to_string(idx) + "]";
    if (!e.is_object()) fail(origin, where, "entry must be an object");
    check_keys(e, origin, where,
               {"label", "world", "variants", "perception", "controller", "camera", "options"});

    ExperimentEntry entry;
    entry.label = get_field<std::string>(e, "label", "", origin, where);
    if (!valid_label(entry.label)) {
      fail(origin, where + ".label", "label must be non-empty [A-Za-z0-9_-]");
    }
    if (!e.contains("world")) fail(origin, where, "missing \"world\"");
    parse_world(e.at("world"), origin, where + ".world", &entry.world);

    if (!e.contains("variants") || !e.at("variants").is_array() || e.at("variants").empty()) {
      fail(origin, where + ".variants", "need a non-empty array of variants");
    }
    for (const auto& v : e.at("variants")) {
      try {
        entry.variants.push_back(variant_from_name(v.get<std::string>()));
      } catch (const std::exception& ex) {
        fail(origin, where + ".variants", ex.what());
      }
    }

    entry.perception.depth_threshold = default_depth_threshold(entry.world.crop);
    if (e.contains("perception")) {
      parse_perception(e.at("perception"), origin, where + ".perception", &entry.perception);
    }
    if (e.contains("controller")) {
      parse_controller(e.at("controller"), origin, where + ".controller", &entry.controller);
    }
    if (e.contains("camera")) {
      parse_camera(e.at("camera"), origin, where + ".camera", &entry.camera);
    }
    if (e.contains("options")) {
      parse_options(e.at("options"), origin, where + ".options", &entry.options);
    }
    entry.controller.frame_width = entry.camera.width;

    try {
      entry.world.validate();
      entry.perception.validate();
      entry.controller.validate();
      entry.camera.validate();
    } catch (const std::exception& ex) {
      fail(origin, where, ex.what());
    }
    spec.entries.push_back(std::move(entry));
    ++idx;
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path);
}

std::string EpisodeJob::dir_name() const {
  return label + "__" + variant_name(variant) + "__seed" + std::to_string(seed);
}

std::vector<EpisodeJob> expand(const ExperimentSpec& spec) {
  std::vector<EpisodeJob> jobs;
  for (const ExperimentEntry& entry : spec.entries) {
    for (const Variant variant : entry.variants) {
      for (const std::uint64_t seed : spec.seeds) {
        EpisodeJob job;
        job.label = entry.label;
        job.variant = variant;
        job.seed = seed;
        job.world = entry.world;
        job.perception = entry.perception;
        job.controller = entry.controller;
        job.camera = entry.camera;
        job.options = entry.options;
        // Randomness is keyed off (seed, label) only, so SegMin/SegMinD/
        // SegZeros see identical worlds and noise for a given seed.
        job.world.jitter_seed = derive_seed(seed, entry.label + "/world");
        job.options.noise_seed = derive_seed(seed, entry.label + "/noise");
        job.perception.variant = variant;
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

namespace {

json config_snapshot(const EpisodeJob& job) {
  json j;
  j["schema_version"] = 1;
  j["label"] = job.label;
  j["variant"] = variant_name(job.variant);
  j["seed"] = job.seed;
  j["world"] = {{"crop", crop_name(job.world.crop)},
                {"row_distance", job.world.row_distance},
                {"plant_distance", job.world.plant_distance},
                {"plant_height", job.world.plant_height},
                {"track_length", job.world.track_length},
                {"curvature", job.world.curvature},
                {"terrain_roughness", job.world.terrain_roughness},
                {"margin_before", job.world.margin_before},
                {"margin_after", job.world.margin_after},
                {"guard_rows", job.world.guard_rows},
                {"jitter_seed", job.world.jitter_seed}};
  j["perception"] = {{"depth_threshold", job.perception.depth_threshold},
                     {"smoothing_window", job.perception.smoothing_window},
                     {"history", job.perception.history}};
  j["controller"] = {{"v_max", job.controller.v_max},
                     {"omega_max", job.controller.omega_max},
                     {"omega_gain", job.controller.omega_gain},
                     {"ema_lambda", job.controller.ema_lambda},
                     {"frame_width", job.controller.frame_width}};
  j["camera"] = {{"width", job.camera.width},
                 {"height", job.camera.height},
                 {"hfov_deg", job.camera.hfov_deg},
                 {"vfov_deg", job.camera.vfov_deg},
                 {"forward_offset", job.camera.forward_offset},
                 {"mount_height", job.camera.mount_height},
                 {"pitch_deg", job.camera.pitch_deg},
                 {"max_range", job.camera.max_range}};
  j["options"] = {{"max_duration", job.options.max_duration},
                  {"start_lateral_offset", job.options.start_lateral_offset},
                  {"start_heading_offset", job.options.start_heading_offset},
                  {"divergence_lateral", job.options.divergence_lateral},
                  {"depth_noise_sigma", job.options.depth_noise_sigma},
                  {"mask_noise_prob", job.options.mask_noise_prob},
                  {"noise_seed", job.options.noise_seed}};
  return j;
}

void write_trajectory_csv(const std::string& path, const EpisodeResult& result) {
  std::ofstream out(path);
  out << "t,x,y,theta,x_h,d,v_x,omega_z,v_bar,omega_bar\n";
  for (const TrajectorySample& s : result.trajectory) {
    out << fmt_num(s.t) << ',' << fmt_num(s.x) << ',' << fmt_num(s.y) << ',' << fmt_num(s.theta)
        << ',' << fmt_num(s.x_h) << ',' << fmt_num(s.d) << ',' << fmt_num(s.v_raw) << ','
        << fmt_num(s.omega_raw) << ',' << fmt_num(s.v_smooth) << ',' << fmt_num(s.omega_smooth)
        << '\n';
  }
}

void write_commands_csv(const std::string& path, const EpisodeResult& result) {
  std::ofstream out(path);
  out << "t,x_h,d,v_x,omega_z,v_bar,omega_bar\n";
  for (const CommandSample& c : result.commands) {
    out << fmt_num(c.t) << ',' << fmt_num(c.x_h) << ',' << fmt_num(c.d) << ',' << fmt_num(c.v_raw)
        << ',' << fmt_num(c.omega_raw) << ',' << fmt_num(c.v_smooth) << ','
        << fmt_num(c.omega_smooth) << '\n';
  }
}

json metrics_json(const EpisodeMetrics& m, const EpisodeResult& result) {
  json j;
  j["completed"] = m.completed;
  j["failure_reason"] = result.failure_reason;
  j["clearance_time_s"] = m.completed ? json(m.clearance_time) : json(nullptr);
  j["duration_s"] = result.duration;
  j["mae_m"] = m.mae;
  j["mse_m2"] = m.mse;
  j["heading_avg_rad"] = m.heading_avg;
  j["v_avg_mps"] = m.v_avg;
  j["omega_stddev_radps"] = m.omega_stddev;
  j["stop_events"] = m.stop_events;
  j["nogap_updates"] = result.nogap_updates;
  return j;
}

}  // namespace

ExperimentSpec default_experiment_spec() {
  ExperimentSpec spec;
  spec.output_dir = "out/benchmark";
  spec.seeds = {1, 2, 3};

  auto entry = [&](const std::string& label, Crop crop, double curvature,
                   std::vector<Variant> variants) {
    ExperimentEntry e;
    e.label = label;
    e.world = WorldConfig::for_crop(crop);
    e.world.curvature = curvature;
    e.variants = std::move(variants);
    e.perception.depth_threshold = default_depth_threshold(crop);
    spec.entries.push_back(std::move(e));
  };

  entry("high_trees", Crop::HighTreesField, 0.0, {Variant::SegMin, Variant::SegMinD});
  entry("pear_trees", Crop::PearField, 0.0, {Variant::SegMin, Variant::SegMinD});
  entry("pergola_vineyard", Crop::PergolaVineyard, 0.0, {Variant::SegMin, Variant::SegMinD});
  entry("straight_vineyard", Crop::CommonVineyard, 0.0,
        {Variant::SegMin, Variant::SegMinD, Variant::SegZeros});
  entry("curved_vineyard", Crop::CommonVineyard, 0.05, {Variant::SegZeros});
  return spec;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& output_root) {
  fs::path out_dir(spec.output_dir);
  if (!output_root.empty() && out_dir.is_relative()) out_dir = fs::path(output_root) / out_dir;
  fs::create_directories(out_dir);

  const std::vector<EpisodeJob> jobs = expand(spec);
  ExperimentOutcome outcome;

  // metrics grouped per (label, variant) in spec order
  std::vector<std::pair<std::string, std::vector<EpisodeMetrics>>> groups;
  auto group_of = [&](const std::string& key) -> std::vector<EpisodeMetrics>& {
    for (auto& g : groups) {
      if (g.first == key) return g.second;
    }
    groups.emplace_back(key, std::vector<EpisodeMetrics>{});
    return groups.back().second;
  };

  for (const EpisodeJob& job : jobs) {
    const fs::path episode_dir = out_dir / job.dir_name();
    fs::create_directories(episode_dir);

    EpisodeJob run_job = job;
    if (spec.debug_frames) run_job.options.debug_frame_dir = (episode_dir / "frames").string();

    const World world = generate_world(run_job.world);
    const EpisodeResult result = run_episode(world, run_job.camera, run_job.perception,
                                             run_job.controller, {}, run_job.options);
    const EpisodeMetrics metrics = compute_metrics(result, ground_truth_centerline(world));
    outcome.all_completed = outcome.all_completed && result.completed;

    write_trajectory_csv((episode_dir / "trajectory.csv").string(), result);
    write_commands_csv((episode_dir / "commands.csv").string(), result);
    {
      std::ofstream mf(episode_dir / "metrics.json");
      mf << metrics_json(metrics, result).dump(2) << '\n';
    }
    {
      std::ofstream cf(episode_dir / "config.json");
      cf << config_snapshot(run_job).dump(2) << '\n';
    }
    group_of(job.label + "," + variant_name(job.variant)).push_back(metrics);
  }

  const fs::path summary_path = out_dir / "summary.csv";
  std::ofstream csv(summary_path);
  csv << "world,method,runs,completed,clearance_mean_s,clearance_std_s,mae_mean_m,mae_std_m,"
         "mse_mean_m2,mse_std_m2,heading_mean_rad,heading_std_rad,v_avg_mean_mps,"
         "v_avg_std_mps,omega_stddev_mean_radps,omega_stddev_std_radps,stop_events\n";
  for (const auto& [key, metrics_list] : groups) {
    const RunSummary summary = aggregate(metrics_list);
    outcome.summaries.emplace_back(key, summary);
    csv << key << ',' << summary.runs << ',' << summary.completed_runs << ','
        << fmt_num(summary.clearance_time.mean) << ',' << fmt_num(summary.clearance_time.stddev)
        << ',' << fmt_num(summary.mae.mean) << ',' << fmt_num(summary.mae.stddev) << ','
        << fmt_num(summary.mse.mean) << ',' << fmt_num(summary.mse.stddev) << ','
        << fmt_num(summary.heading_avg.mean) << ',' << fmt_num(summary.heading_avg.stddev) << ','
        << fmt_num(summary.v_avg.mean) << ',' << fmt_num(summary.v_avg.stddev) << ','
        << fmt_num(summary.omega_stddev.mean) << ',' << fmt_num(summary.omega_stddev.stddev)
        << ',' << summary.stop_events_total << '\n';
  }
  csv.close();
  outcome.summary_csv_path = summary_path.string();
  return outcome;
}

}  // namespace rownav
