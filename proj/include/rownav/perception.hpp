#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "rownav/grid.hpp"

namespace rownav {

using ColumnHistogram = std::vector<double>;

enum class Variant { SegMin, SegMinD, SegZeros };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct PerceptionConfig {
  double depth_threshold = 5.0;  // m; crop dependent (5 vineyard, 8 pear/pergola, 10 tall trees)
  int smoothing_window = 15;     // odd pixel count
  int history = 3;               // frames fused by OR
  Variant variant = Variant::SegMin;

  void validate() const;  // throws std::invalid_argument
};

/// Keeps the most recent `capacity` vegetation masks, all dimension-equal.
class MaskBuffer {
 public:
  explicit MaskBuffer(int capacity);

  void push(VegetationMask mask);
  void clear() { frames_.clear(); }

  bool empty() const { return frames_.empty(); }
  int size() const { return static_cast<int>(frames_.size()); }
  int capacity() const { return capacity_; }
  const std::deque<VegetationMask>& frames() const { return frames_; }

 private:
  int capacity_;
  std::deque<VegetationMask> frames_;
};

/// Logical OR of all buffered masks.
VegetationMask fuse_masks(const MaskBuffer& buffer);

/// Keep a cell iff it is vegetation and its depth is within the threshold.
/// No-return cells carry kNoReturnDepth and are always dropped.
VegetationMask gate_by_depth(const VegetationMask& mask, const DepthImage& depth,
                             double depth_threshold);

/// Scale gated cells by 1 - depth/d_th so near vegetation dominates the
/// histogram. Output clamped to [0, 1].
WeightedImage weight_by_inverse_depth(const VegetationMask& gated, const DepthImage& depth,
                                      double depth_threshold);

ColumnHistogram column_histogram(const VegetationMask& grid);
ColumnHistogram column_histogram(const WeightedImage& grid);

/// Centered moving average. Windows are truncated at the borders and the
/// divisor shrinks with them, so edge columns are not pulled toward zero.
ColumnHistogram smooth_histogram(const ColumnHistogram& hist, int window);

/// Index of the histogram's global minimum; ties resolve to the arithmetic
/// mean of all tying indices and can therefore be fractional.
double find_row_center(const ColumnHistogram& hist);

/// Center of the widest run of all-zero columns, ties going to the run
/// closest to the frame center. nullopt when no zero column exists; the
/// caller is expected to stop the robot in that case.
std::optional<double> segzeros_center(const VegetationMask& gated);

/// Full pipeline: fuse -> gate -> (SegMinD: weight) -> histogram -> smooth
/// -> minimum, or fuse -> gate -> zero-run search for SegZeros.
std::optional<double> perceive(const MaskBuffer& buffer, const DepthImage& depth,
                               const PerceptionConfig& cfg);

}  // namespace rownav
