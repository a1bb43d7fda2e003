#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Brute-force reference implementation of the perception pipeline, written
// against plain vectors with no dependency on the main library. Every stage
// is a direct loop over the definition. Used by the `oracle` CLI command and
// by the test suites to cross-check the optimized path.
namespace rownav::oracle {

struct GridData {
  int width = 0;
  int height = 0;
  std::vector<double> cells;  // row-major

  double at(int i, int j) const { return cells[static_cast<std::size_t>(i) * width + j]; }
};

GridData fuse_masks(const std::vector<GridData>& masks);
GridData gate_by_depth(const GridData& mask, const GridData& depth, double depth_threshold);
GridData weight_by_inverse_depth(const GridData& gated, const GridData& depth,
                                 double depth_threshold);
std::vector<double> column_histogram(const GridData& grid);
std::vector<double> smooth_histogram(const std::vector<double>& hist, int window);
double find_row_center(const std::vector<double>& hist);
std::optional<double> segzeros_center(const GridData& gated);

/// Full pipeline for one variant ("segmin", "segmind", "segzeros").
std::optional<double> perceive(const std::vector<GridData>& masks, const GridData& depth,
                               double depth_threshold, int window, const std::string& variant);

}  // namespace rownav::oracle
