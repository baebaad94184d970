#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ssimdecomp/blockstats.hpp"

namespace ssimdecomp {

/// Row-major grayscale image with real-valued pixels. Values normally lie in
/// [0, 255]; reconstructions may overshoot until they are quantized by
/// write_pgm.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

enum class PgmFormat { P2, P5 };

/// Parses P2 (ASCII) or P5 (binary) PGM with maxval <= 255. Sample values are
/// kept as stored, without rescaling by maxval.
GrayImage read_pgm(std::string_view bytes);

/// Writes maxval 255. Samples are rounded half away from zero, then clamped
/// to [0, 255].
std::string write_pgm(const GrayImage& img, PgmFormat format);

GrayImage read_pgm_file(const std::string& path);
void write_pgm_file(const GrayImage& img, const std::string& path, PgmFormat format);

/// Non-overlapping l x l tiles in row-major grid order. Edges that are not a
/// multiple of l are padded by replicating the last column / row.
struct BlockGrid {
  std::size_t block_edge = 0;
  std::size_t blocks_x = 0;
  std::size_t blocks_y = 0;
  std::size_t pad_right = 0;
  std::size_t pad_bottom = 0;
  std::vector<Block> blocks;
};

BlockGrid tile(const GrayImage& img, std::size_t l);
GrayImage untile(const BlockGrid& grid);

}  // namespace ssimdecomp
