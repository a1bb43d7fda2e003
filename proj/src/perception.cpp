#include "rownav/perception.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rownav {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SegMin: return "segmin";
    case Variant::SegMinD: return "segmind";
    case Variant::SegZeros: return "segzeros";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "segmin") return Variant::SegMin;
  if (name == "segmind") return Variant::SegMinD;
  if (name == "segzeros") return Variant::SegZeros;
  throw std::invalid_argument("unknown variant: " + name);
}

void PerceptionConfig::validate() const {
  if (depth_threshold <= 0.0) throw std::invalid_argument("depth_threshold must be > 0");
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw std::invalid_argument("smoothing_window must be odd and >= 1");
  }
  if (history < 1) throw std::invalid_argument("history must be >= 1");
}

MaskBuffer::MaskBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("mask buffer capacity must be >= 1");
}

void MaskBuffer::push(VegetationMask mask) {
  if (!frames_.empty() && !frames_.front().same_shape(mask)) {
    throw std::invalid_argument("mask dimensions differ from buffered frames");
  }
  frames_.push_back(std::move(mask));
  while (static_cast<int>(frames_.size()) > capacity_) frames_.pop_front();
}

VegetationMask fuse_masks(const MaskBuffer& buffer) {
  if (buffer.empty()) throw std::invalid_argument("no frames");
  const auto& frames = buffer.frames();
  VegetationMask out = frames.front();
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const auto& src = frames[k].cells();
    auto& dst = out.cells();
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] |= src[c];
  }
  for (auto& c : out.cells()) c = c ? 1 : 0;
  return out;
}

VegetationMask gate_by_depth(const VegetationMask& mask, const DepthImage& depth,
                             double depth_threshold) {
  if (!mask.same_shape(depth)) throw std::invalid_argument("mask/depth dimension mismatch");
  if (depth_threshold <= 0.0) throw std::invalid_argument("depth_threshold must be > 0");
  VegetationMask out(mask.width(), mask.height());
  const auto& m = mask.cells();
  const auto& d = depth.cells();
  auto& o = out.cells();
  for (std::size_t c = 0; c < m.size(); ++c) {
    o[c] = (m[c] != 0 && d[c] <= depth_threshold) ? 1 : 0;
  }
  return out;
}

WeightedImage weight_by_inverse_depth(const VegetationMask& gated, const DepthImage& depth,
                                      double depth_threshold) {
  if (!gated.same_shape(depth)) throw std::invalid_argument("mask/depth dimension mismatch");
  if (depth_threshold <= 0.0) throw std::invalid_argument("depth_threshold must be > 0");
  WeightedImage out(gated.width(), gated.height());
  const auto& m = gated.cells();
  const auto& d = depth.cells();
  auto& o = out.cells();
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (m[c] == 0) {
      o[c] = 0.0;
      continue;
    }
    double w = 1.0 - d[c] / depth_threshold;
    if (w < 0.0) w = 0.0;
    if (w > 1.0) w = 1.0;
    o[c] = w;
  }
  return out;
}

namespace {
template <typename T>
ColumnHistogram histogram_impl(const Grid<T>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  ColumnHistogram hist(grid.width(), 0.0);
  for (int i = 0; i < grid.height(); ++i) {
    const T* row = grid.row(i);
    for (int j = 0; j < grid.width(); ++j) hist[j] += static_cast<double>(row[j]);
  }
  return hist;
}
}  // namespace

ColumnHistogram column_histogram(const VegetationMask& grid) { return histogram_impl(grid); }
ColumnHistogram column_histogram(const WeightedImage& grid) { return histogram_impl(grid); }

ColumnHistogram smooth_histogram(const ColumnHistogram& hist, int window) {
  const int w = static_cast<int>(hist.size());
  if (w == 0) throw std::invalid_argument("empty histogram");
  if (window < 1 || window > w || window % 2 == 0) {
    throw std::invalid_argument("smoothing window must be odd and within [1, width]");
  }
  const int r = (window - 1) / 2;
  ColumnHistogram out(hist.size());
  for (int j = 0; j < w; ++j) {
    const int lo = std::max(0, j - r);
    const int hi = std::min(w - 1, j + r);
    double sum = 0.0;
    for (int k = lo; k <= hi; ++k) sum += hist[k];
    out[j] = sum / (hi - lo + 1);
  }
  return out;
}

double find_row_center(const ColumnHistogram& hist) {
  if (hist.empty()) throw std::invalid_argument("empty histogram");
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

std::optional<double> segzeros_center(const VegetationMask& gated) {
  const ColumnHistogram hist = column_histogram(gated);
  const int w = static_cast<int>(hist.size());
  const double frame_center = (w - 1) / 2.0;

  // Widest zero run; ties go to the run nearest the frame center, and two
  // equidistant runs average (mirroring the histogram tie rule).
  int best_len = 0;
  double best_dist = 0.0;
  double center_sum = 0.0;
  int center_count = 0;
  for (int j = 0; j < w;) {
    if (hist[j] != 0.0) {
      ++j;
      continue;
    }
    const int start = j;
    while (j < w && hist[j] == 0.0) ++j;
    const int len = j - start;
    const double center = (start + (j - 1)) / 2.0;
    const double dist = std::abs(center - frame_center);
    if (len > best_len || (len == best_len && dist < best_dist)) {
      best_len = len;
      best_dist = dist;
      center_sum = center;
      center_count = 1;
    } else if (len == best_len && len > 0 && dist == best_dist) {
      center_sum += center;
      ++center_count;
    }
  }
  if (best_len == 0) return std::nullopt;
  return center_sum / center_count;
}

std::optional<double> perceive(const MaskBuffer& buffer, const DepthImage& depth,
                               const PerceptionConfig& cfg) {
  cfg.validate();
  const VegetationMask fused = fuse_masks(buffer);
  const VegetationMask gated = gate_by_depth(fused, depth, cfg.depth_threshold);

  if (cfg.variant == Variant::SegZeros) return segzeros_center(gated);

  ColumnHistogram hist;
  if (cfg.variant == Variant::SegMinD) {
    hist = column_histogram(weight_by_inverse_depth(gated, depth, cfg.depth_threshold));
  } else {
    hist = column_histogram(gated);
  }
  return find_row_center(smooth_histogram(hist, cfg.smoothing_window));
}

}  // namespace rownav
