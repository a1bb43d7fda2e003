#include "rownav/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rownav {

namespace {

constexpr std::uint16_t kNoReturnPixel = 65535;

void write_header(std::ofstream& out, int width, int height, int maxval) {
  out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
}

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

int next_pgm_int(std::istream& in) {
  // Skips whitespace and '#' comment lines, per the netpbm spec.
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    }
    c = in.get();
  }
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw std::runtime_error("malformed PGM header");
  return value;
}

PgmHeader read_header(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw std::runtime_error("not a binary PGM file");
  PgmHeader h;
  h.width = next_pgm_int(in);
  h.height = next_pgm_int(in);
  h.maxval = next_pgm_int(in);
  if (h.width <= 0 || h.height <= 0) throw std::runtime_error("invalid PGM dimensions");
  return h;
}

}  // namespace

void write_mask_pgm(const std::string& path, const VegetationMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_header(out, mask.width(), mask.height(), 255);
  std::vector<std::uint8_t> row(mask.width());
  for (int i = 0; i < mask.height(); ++i) {
    for (int j = 0; j < mask.width(); ++j) row[j] = mask.at(i, j) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

VegetationMask read_mask_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  const PgmHeader h = read_header(in);
  if (h.maxval != 255) throw std::runtime_error("expected 8-bit mask PGM: " + path);
  VegetationMask mask(h.width, h.height);
  std::vector<std::uint8_t> row(h.width);
  for (int i = 0; i < h.height; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw std::runtime_error("truncated PGM: " + path);
    for (int j = 0; j < h.width; ++j) mask.at(i, j) = row[j] > 127 ? 1 : 0;
  }
  return mask;
}

void write_depth_pgm(const std::string& path, const DepthImage& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_header(out, depth.width(), depth.height(), 65535);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(depth.width()) * 2);
  for (int i = 0; i < depth.height(); ++i) {
    for (int j = 0; j < depth.width(); ++j) {
      const double meters = depth.at(i, j);
      std::uint16_t mm = kNoReturnPixel;
      if (meters < kNoReturnDepth) {
        const double scaled = std::round(meters * 1000.0);
        mm = scaled >= kNoReturnPixel ? kNoReturnPixel : static_cast<std::uint16_t>(
                                                             std::max(0.0, scaled));
      }
      row[2 * j] = static_cast<std::uint8_t>(mm >> 8);
      row[2 * j + 1] = static_cast<std::uint8_t>(mm & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DepthImage read_depth_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  const PgmHeader h = read_header(in);
  if (h.maxval != 65535) throw std::runtime_error("expected 16-bit depth PGM: " + path);
  DepthImage depth(h.width, h.height);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(h.width) * 2);
  for (int i = 0; i < h.height; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw std::runtime_error("truncated PGM: " + path);
    for (int j = 0; j < h.width; ++j) {
      const std::uint16_t mm = static_cast<std::uint16_t>((row[2 * j] << 8) | row[2 * j + 1]);
      depth.at(i, j) = mm == kNoReturnPixel ? kNoReturnDepth : mm / 1000.0;
    }
  }
  return depth;
}

}  // namespace rownav
