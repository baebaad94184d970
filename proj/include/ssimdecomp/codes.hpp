#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ssimdecomp/cost_kind.hpp"
#include "ssimdecomp/dictionary.hpp"
#include "ssimdecomp/imageio.hpp"

namespace ssimdecomp {

struct CodesHeader {
  std::size_t block_edge = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t pad_right = 0;
  std::size_t pad_bottom = 0;
  std::size_t sparsity = 0;
  CostKind cost = CostKind::MSE;
  std::uint64_t dict_checksum = 0;

  std::size_t blocks_x() const noexcept { return block_edge ? (width + pad_right) / block_edge : 0; }
  std::size_t blocks_y() const noexcept { return block_edge ? (height + pad_bottom) / block_edge : 0; }
  friend bool operator==(const CodesHeader&, const CodesHeader&) = default;
};

/// One block's code. An empty atom list is an offset-only (constant) block.
struct BlockCode {
  std::size_t index = 0;
  std::vector<std::size_t> atoms;
  std::vector<double> coeffs;
  double offset = 0.0;
  friend bool operator==(const BlockCode&, const BlockCode&) = default;
};

struct CodesFile {
  CodesHeader header;
  std::vector<BlockCode> records;
  friend bool operator==(const CodesFile&, const CodesFile&) = default;
};

/// Line-oriented text:
///   SSIMDECOMP-CODES 1
///   l=<l> w=<w> h=<h> padr=<pr> padb=<pb> m=<m> cost=<tag> dictsum=<16 hex digits>
///   <blockindex>: <i1>,...,<ik>; <s1>,...,<sk>; <o>
std::string save_codes(const CodesFile& codes);
CodesFile load_codes(std::string_view text);

CodesFile read_codes_file(const std::string& path);
void write_codes_file(const CodesFile& codes, const std::string& path);

enum class SearchKind { greedy, exhaustive };

struct DecomposeOptions {
  std::size_t sparsity = 1;
  CostKind cost = CostKind::MSE;
  /// Which closed form supplies the stored coefficients. PCC only selects
  /// atoms, so it borrows the MSE coefficients unless told otherwise.
  CostKind coeffs = CostKind::MSE;
  SearchKind search = SearchKind::greedy;
  Orientation orientation = Orientation::maximize;
  unsigned threads = 0;
};

struct DecomposeResult {
  CodesFile codes;
  std::vector<double> block_mse;     ///< per block, before quantization
  double mean_mse = 0.0;
  double mean_ssim = 0.0;            ///< over non-constant blocks; NaN if none
  double mean_pcc = 0.0;             ///< over non-constant blocks; NaN if none
  std::size_t constant_blocks = 0;
  std::size_t degenerate_blocks = 0; ///< uncorrelated blocks stored offset-only
};

/// Tiles at the dictionary's block edge and decomposes every block.
DecomposeResult decompose_image(const GrayImage& img, const Dictionary& dict, const DecomposeOptions& opts);

/// Rebuilds the unquantized image. Throws ChecksumMismatch when `dict` is not
/// the dictionary the codes were produced with.
GrayImage reconstruct_image(const CodesFile& codes, const Dictionary& dict);

}  // namespace ssimdecomp
