#include "rownav/pipeline_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rownav::oracle {

namespace {
void require_same_shape(const GridData& a, const GridData& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("oracle: dimension mismatch");
  }
}
}  // namespace

GridData fuse_masks(const std::vector<GridData>& masks) {
  if (masks.empty()) throw std::invalid_argument("oracle: no frames");
  GridData out = masks[0];
  for (std::size_t k = 1; k < masks.size(); ++k) {
    require_same_shape(out, masks[k]);
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
      out.cells[c] = (out.cells[c] != 0.0 || masks[k].cells[c] != 0.0) ? 1.0 : 0.0;
    }
  }
  for (double& c : out.cells) c = c != 0.0 ? 1.0 : 0.0;
  return out;
}

GridData gate_by_depth(const GridData& mask, const GridData& depth, double depth_threshold) {
  require_same_shape(mask, depth);
  GridData out = mask;
  for (int i = 0; i < mask.height; ++i) {
    for (int j = 0; j < mask.width; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * mask.width + j;
      out.cells[c] = (mask.cells[c] != 0.0 && depth.cells[c] <= depth_threshold) ? 1.0 : 0.0;
    }
  }
  return out;
}

GridData weight_by_inverse_depth(const GridData& gated, const GridData& depth,
                                 double depth_threshold) {
  require_same_shape(gated, depth);
  if (depth_threshold <= 0.0) throw std::invalid_argument("oracle: depth threshold must be > 0");
  GridData out = gated;
  for (std::size_t c = 0; c < gated.cells.size(); ++c) {
    double w = 1.0 - depth.cells[c] / depth_threshold;
    if (w < 0.0) w = 0.0;
    if (w > 1.0) w = 1.0;
    out.cells[c] = gated.cells[c] != 0.0 ? w : 0.0;
  }
  return out;
}

std::vector<double> column_histogram(const GridData& grid) {
  std::vector<double> hist(grid.width, 0.0);
  for (int j = 0; j < grid.width; ++j) {
    double sum = 0.0;
    for (int i = 0; i < grid.height; ++i) sum += grid.at(i, j);
    hist[j] = sum;
  }
  return hist;
}

std::vector<double> smooth_histogram(const std::vector<double>& hist, int window) {
  const int w = static_cast<int>(hist.size());
  if (window < 1 || window > w || window % 2 == 0) {
    throw std::invalid_argument("oracle: window must be odd and within [1, width]");
  }
  const int r = (window - 1) / 2;
  std::vector<double> out(hist.size(), 0.0);
  for (int j = 0; j < w; ++j) {
    double sum = 0.0;
    int count = 0;
    for (int k = j - r; k <= j + r; ++k) {
      if (k < 0 || k >= w) continue;
      sum += hist[k];
      ++count;
    }
    out[j] = sum / count;
  }
  return out;
}

double find_row_center(const std::vector<double>& hist) {
  if (hist.empty()) throw std::invalid_argument("oracle: empty histogram");
  double min_v = hist[0];
  for (double v : hist) {
    if (v < min_v) min_v = v;
  }
  double sum_idx = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < hist.size(); ++j) {
    if (hist[j] == min_v) {
      sum_idx += static_cast<double>(j);
      ++count;
    }
  }
  return sum_idx / count;
}

std::optional<double> segzeros_center(const GridData& gated) {
  const std::vector<double> hist = column_histogram(gated);
  const int w = static_cast<int>(hist.size());
  const double frame_center = (w - 1) / 2.0;

  // Collect every maximal zero run, then apply the tie rules directly:
  // widest first, then nearest to the frame center, then the mean of what
  // remains.
  struct Run {
    int len;
    double center;
  };
  std::vector<Run> runs;
  int j = 0;
  while (j < w) {
    if (hist[j] == 0.0) {
      int start = j;
      while (j < w && hist[j] == 0.0) ++j;
      runs.push_back({j - start, (start + (j - 1)) / 2.0});
    } else {
      ++j;
    }
  }
  if (runs.empty()) return std::nullopt;

  int max_len = 0;
  for (const Run& r : runs) max_len = std::max(max_len, r.len);
  double min_dist = 1e300;
  for (const Run& r : runs) {
    if (r.len == max_len) min_dist = std::min(min_dist, std::abs(r.center - frame_center));
  }
  double sum = 0.0;
  int count = 0;
  for (const Run& r : runs) {
    if (r.len == max_len && std::abs(r.center - frame_center) == min_dist) {
      sum += r.center;
      ++count;
    }
  }
  return sum / count;
}

std::optional<double> perceive(const std::vector<GridData>& masks, const GridData& depth,
                               double depth_threshold, int window, const std::string& variant) {
  const GridData fused = fuse_masks(masks);
  const GridData gated = gate_by_depth(fused, depth, depth_threshold);
  if (variant == "segzeros") return segzeros_center(gated);

  std::vector<double> hist;
  if (variant == "segmind") {
    hist = column_histogram(weight_by_inverse_depth(gated, depth, depth_threshold));
  } else if (variant == "segmin") {
    hist = column_histogram(gated);
  } else {
    throw std::invalid_argument("oracle: unknown variant " + variant);
  }
  return find_row_center(smooth_histogram(hist, window));
}

}  // namespace rownav::oracle
