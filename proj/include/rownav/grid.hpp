#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rownav {

// Depth value stored when a ray hits nothing within the sensor range.
// Always beyond any sane depth threshold, so gating removes these cells.
inline constexpr double kNoReturnDepth = 1e4;

/// Row-major 2D grid used for masks, depth images and weighted images.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("grid dimensions must be positive");
    }
    cells_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return cells_.empty(); }

  T& at(int row, int col) { return cells_[static_cast<std::size_t>(row) * width_ + col]; }
  const T& at(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * width_ + col];
  }

  T* row(int i) { return cells_.data() + static_cast<std::size_t>(i) * width_; }
  const T* row(int i) const { return cells_.data() + static_cast<std::size_t>(i) * width_; }

  std::vector<T>& cells() { return cells_; }
  const std::vector<T>& cells() const { return cells_; }

  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

using VegetationMask = Grid<std::uint8_t>;  // cells in {0,1}
using DepthImage = Grid<double>;            // meters, kNoReturnDepth for misses
using WeightedImage = Grid<double>;         // cells in [0,1]

/// Mirror a grid about its vertical axis (column j -> width-1-j).
template <typename T>
Grid<T> flip_horizontal(const Grid<T>& g) {
  Grid<T> out(g.width(), g.height());
  for (int i = 0; i < g.height(); ++i) {
    const T* src = g.row(i);
    T* dst = out.row(i);
    for (int j = 0; j < g.width(); ++j) dst[j] = src[g.width() - 1 - j];
  }
  return out;
}

}  // namespace rownav
