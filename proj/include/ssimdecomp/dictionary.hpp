#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssimdecomp/blockstats.hpp"

namespace ssimdecomp {

struct GrayImage;

/// An ordered, immutable set of atoms sharing one length p. Every atom is
/// non-constant: the offset term already spans the constant direction, and a
/// constant atom would make the covariance system singular.
class Dictionary {
 public:
  Dictionary(std::vector<Block> atoms, std::string provenance = {});

  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t atom_length() const noexcept { return atoms_.front().size(); }
  const Block& atom(std::size_t i) const { return atoms_.at(i); }
  const std::vector<Block>& atoms() const noexcept { return atoms_; }
  const std::string& provenance() const noexcept { return provenance_; }

  /// Edge l of the square block the atoms represent, if p is a perfect square.
  std::optional<std::size_t> block_edge() const noexcept;

 private:
  std::vector<Block> atoms_;
  std::string provenance_;
};

/// n patches of size l x l at seeded uniformly random positions. Constant
/// patches are rejected and redrawn, up to 100 draws per requested atom.
Dictionary build_random_patches(const GrayImage& img, std::size_t l, std::size_t n, std::uint64_t seed);

/// The l*l - 1 orthonormal 2-D DCT-II atoms of an l x l block, DC excluded.
/// Atom k (k >= 1) has horizontal frequency k % l and vertical frequency k / l.
Dictionary build_dct(std::size_t l);

/// Text format:
///   SSIMDECOMP-DICT 1
///   # provenance: <tag>        (optional; any '#' line after line 1 is a comment)
///   <n> <p>
///   n lines of p reals printed with 17 significant digits
std::string save_dictionary(const Dictionary& dict);
Dictionary load_dictionary(std::string_view text);

Dictionary read_dictionary_file(const std::string& path);
void write_dictionary_file(const Dictionary& dict, const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// FNV-1a over the canonical (save_dictionary) bytes.
std::uint64_t dictionary_checksum(const Dictionary& dict);

}  // namespace ssimdecomp
