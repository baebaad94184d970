#include "ssimdecomp/dictionary.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "ssimdecomp/error.hpp"
#include "ssimdecomp/imageio.hpp"

namespace ssimdecomp {

namespace {

constexpr std::string_view kMagic = "SSIMDECOMP-DICT 1";
constexpr std::string_view kProvenancePrefix = "# provenance: ";

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
T parse_token(std::string_view token) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(Errc::MalformedDictFile, "cannot parse '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Dictionary::Dictionary(std::vector<Block> atoms, std::string provenance)
    : atoms_(std::move(atoms)), provenance_(sanitize(std::move(provenance))) {
  if (atoms_.empty()) throw Error(Errc::InvalidArgument, "a dictionary needs at least one atom");
  const std::size_t p = atoms_.front().size();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].size() != p) {
      throw Error(Errc::DimensionMismatch, "atom " + std::to_string(i) + " has length " +
                                               std::to_string(atoms_[i].size()) + ", expected " + std::to_string(p));
    }
    if (is_constant(atoms_[i])) {
      throw Error(Errc::ZeroVarianceAtom, "atom " + std::to_string(i) + " is constant");
    }
  }
}

std::optional<std::size_t> Dictionary::block_edge() const noexcept {
  const std::size_t p = atom_length();
  auto l = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
  if (l * l == p) return l;
  return std::nullopt;
}

Dictionary build_random_patches(const GrayImage& img, std::size_t l, std::size_t n, std::uint64_t seed) {
  if (l < 2) throw Error(Errc::InvalidArgument, "block edge must be at least 2");
  if (n == 0) throw Error(Errc::InvalidArgument, "atom count must be positive");
  if (img.width < l || img.height < l) {
    throw Error(Errc::ImageSmallerThanBlock, "image is smaller than one " + std::to_string(l) + "x" +
                                                 std::to_string(l) + " patch");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_x(0, img.width - l);
  std::uniform_int_distribution<std::size_t> pick_y(0, img.height - l);
  const std::size_t max_draws = 100 * n;

  std::vector<Block> atoms;
  atoms.reserve(n);
  std::size_t draws = 0;
  while (atoms.size() < n) {
    if (draws++ >= max_draws) {
      throw Error(Errc::TooManyConstantPatches,
                  "only " + std::to_string(atoms.size()) + " non-constant patches in " + std::to_string(max_draws) +
                      " draws");
    }
    const std::size_t x0 = pick_x(rng);
    const std::size_t y0 = pick_y(rng);
    std::vector<double> samples;
    samples.reserve(l * l);
    for (std::size_t dy = 0; dy < l; ++dy) {
      for (std::size_t dx = 0; dx < l; ++dx) samples.push_back(img.at(x0 + dx, y0 + dy));
    }
    Block patch(std::move(samples));
    if (!is_constant(patch)) atoms.push_back(std::move(patch));
  }
  return Dictionary(std::move(atoms), fmt::format("patches l={} n={} seed={}", l, n, seed));
}

Dictionary build_dct(std::size_t l) {
  if (l < 2) throw Error(Errc::InvalidArgument, "block edge must be at least 2");
  const double len = static_cast<double>(l);
  auto basis = [&](std::size_t freq, std::size_t pos) {
    const double c = freq == 0 ? std::sqrt(1.0 / len) : std::sqrt(2.0 / len);
    return c * std::cos(std::numbers::pi * (2.0 * static_cast<double>(pos) + 1.0) * static_cast<double>(freq) /
                        (2.0 * len));
  };
  std::vector<Block> atoms;
  atoms.reserve(l * l - 1);
  for (std::size_t k = 1; k < l * l; ++k) {
    const std::size_t u = k % l;
    const std::size_t v = k / l;
    std::vector<double> samples(l * l);
    for (std::size_t y = 0; y < l; ++y) {
      for (std::size_t x = 0; x < l; ++x) samples[y * l + x] = basis(u, x) * basis(v, y);
    }
    atoms.emplace_back(std::move(samples));
  }
  return Dictionary(std::move(atoms), fmt::format("dct l={}", l));
}

std::string save_dictionary(const Dictionary& dict) {
  std::string out;
  out += kMagic;
  out += '\n';
  if (!dict.provenance().empty()) {
    out += kProvenancePrefix;
    out += dict.provenance();
    out += '\n';
  }
  out += fmt::format("{} {}\n", dict.size(), dict.atom_length());
  for (const Block& atom : dict.atoms()) {
    for (std::size_t i = 0; i < atom.size(); ++i) {
      if (i > 0) out += ' ';
      out += fmt::format("{:.17g}", atom[i]);
    }
    out += '\n';
  }
  return out;
}

Dictionary load_dictionary(std::string_view text) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty() || lines.front() != kMagic) {
    throw Error(Errc::MalformedDictFile, "missing 'SSIMDECOMP-DICT 1' header");
  }
  std::string provenance;
  std::vector<std::string_view> body;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (!line.empty() && line.front() == '#') {
      if (line.starts_with(kProvenancePrefix) && provenance.empty()) {
        provenance = std::string(line.substr(kProvenancePrefix.size()));
      }
      continue;
    }
    if (split_ws(line).empty()) continue;
    body.push_back(line);
  }
  if (body.empty()) throw Error(Errc::MalformedDictFile, "missing '<n> <p>' line");
  const auto dims = split_ws(body.front());
  if (dims.size() != 2) throw Error(Errc::MalformedDictFile, "expected '<n> <p>'");
  const auto n = parse_token<std::size_t>(dims[0]);
  const auto p = parse_token<std::size_t>(dims[1]);
  if (n == 0 || p < 2) throw Error(Errc::MalformedDictFile, "atom count and length must be positive");
  if (body.size() - 1 != n) {
    throw Error(Errc::MalformedDictFile, "header declares " + std::to_string(n) + " atoms, file has " +
                                             std::to_string(body.size() - 1));
  }
  std::vector<Block> atoms;
  atoms.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto tokens = split_ws(body[a + 1]);
    if (tokens.size() != p) {
      throw Error(Errc::MalformedDictFile, "atom " + std::to_string(a) + " has " + std::to_string(tokens.size()) +
                                               " values, expected " + std::to_string(p));
    }
    std::vector<double> samples;
    samples.reserve(p);
    for (std::string_view t : tokens) samples.push_back(parse_token<double>(t));
    try {
      atoms.emplace_back(std::move(samples));
    } catch (const Error& e) {
      throw Error(Errc::MalformedDictFile, e.what());
    }
  }
  return Dictionary(std::move(atoms), std::move(provenance));
}

Dictionary read_dictionary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_dictionary(ss.str());
}

void write_dictionary_file(const Dictionary& dict, const std::string& path) {
  const std::string text = save_dictionary(dict);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(Errc::Io, "failed writing '" + path + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t dictionary_checksum(const Dictionary& dict) { return fnv1a64(save_dictionary(dict)); }

}  // namespace ssimdecomp
