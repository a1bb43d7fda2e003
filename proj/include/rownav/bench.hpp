#pragma once

#include <string>
#include <vector>

namespace rownav {

struct BenchStage {
  std::string stage;
  int samples = 0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchStage> stages;
  bool within_budget = false;  // perceive p99 under the 20 Hz budget headroom
  double perceive_budget_ms = 50.0;
};

/// Times render / perceive / control on 224x224 frames from a live scene.
/// The first frame of each stage is warmup and not counted.
BenchReport run_benchmark(int samples = 200);

std::string bench_report_csv(const BenchReport& report);

}  // namespace rownav
