#include "ssimdecomp/codes.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "ssimdecomp/error.hpp"
#include "ssimdecomp/parallel.hpp"
#include "ssimdecomp/selection.hpp"
#include "ssimdecomp/solvers.hpp"

namespace ssimdecomp {

namespace {

constexpr std::string_view kMagic = "SSIMDECOMP-CODES 1";

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedCodesFile, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view token, int base = 10) {
  token = trim(token);
  T value{};
  std::from_chars_result r{};
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(token.data(), token.data() + token.size(), value);
  } else {
    r = std::from_chars(token.data(), token.data() + token.size(), value, base);
  }
  if (token.empty() || r.ec != std::errc() || r.ptr != token.data() + token.size()) {
    malformed("cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view field) {
  std::vector<T> out;
  field = trim(field);
  if (field.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = field.find(',', start);
    out.push_back(parse_number<T>(field.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

CodesHeader parse_header(std::string_view line) {
  std::map<std::string, std::string, std::less<>> fields;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) malformed("header token '" + token + "' is not key=value");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto get = [&](std::string_view key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) malformed("header is missing '" + std::string(key) + "'");
    return it->second;
  };
  CodesHeader h;
  h.block_edge = parse_number<std::size_t>(get("l"));
  h.width = parse_number<std::size_t>(get("w"));
  h.height = parse_number<std::size_t>(get("h"));
  h.pad_right = parse_number<std::size_t>(get("padr"));
  h.pad_bottom = parse_number<std::size_t>(get("padb"));
  h.sparsity = parse_number<std::size_t>(get("m"));
  const auto cost = parse_cost_kind(get("cost"));
  if (!cost) malformed("unknown cost tag '" + get("cost") + "'");
  h.cost = *cost;
  const std::string& sum = get("dictsum");
  if (sum.size() != 16) malformed("dictsum must be 16 hex digits");
  h.dict_checksum = parse_number<std::uint64_t>(sum, 16);
  if (h.block_edge < 2 || h.width == 0 || h.height == 0 || h.sparsity == 0) {
    malformed("header values out of range");
  }
  if (h.pad_right >= h.block_edge || h.pad_bottom >= h.block_edge || (h.width + h.pad_right) % h.block_edge != 0 ||
      (h.height + h.pad_bottom) % h.block_edge != 0) {
    malformed("padding is inconsistent with the block edge");
  }
  return h;
}

BlockCode parse_record(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) malformed("record is missing ':'");
  BlockCode rec;
  rec.index = parse_number<std::size_t>(line.substr(0, colon));
  const std::string_view rest = line.substr(colon + 1);
  const auto s1 = rest.find(';');
  const auto s2 = s1 == std::string_view::npos ? s1 : rest.find(';', s1 + 1);
  if (s2 == std::string_view::npos || rest.find(';', s2 + 1) != std::string_view::npos) {
    malformed("record must have three ';'-separated fields");
  }
  rec.atoms = parse_list<std::size_t>(rest.substr(0, s1));
  rec.coeffs = parse_list<double>(rest.substr(s1 + 1, s2 - s1 - 1));
  rec.offset = parse_number<double>(rest.substr(s2 + 1));
  return rec;
}

double abs_ssim_or_zero(const Block& x, const Block& y) {
  try {
    return std::abs(ssim(x, y));
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateInput) throw;
    return std::abs(ssim_reduced(x, y));
  }
}

}  // namespace

std::string save_codes(const CodesFile& codes) {
  const CodesHeader& h = codes.header;
  std::string out(kMagic);
  out += '\n';
  out += fmt::format("l={} w={} h={} padr={} padb={} m={} cost={} dictsum={:016x}\n", h.block_edge, h.width,
                     h.height, h.pad_right, h.pad_bottom, h.sparsity, to_string(h.cost), h.dict_checksum);
  for (const BlockCode& rec : codes.records) {
    out += fmt::format("{}: {}; ", rec.index, fmt::join(rec.atoms, ","));
    for (std::size_t k = 0; k < rec.coeffs.size(); ++k) {
      if (k > 0) out += ',';
      out += fmt::format("{:.17g}", rec.coeffs[k]);
    }
    out += fmt::format("; {:.17g}\n", rec.offset);
  }
  return out;
}

CodesFile load_codes(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.size() < 2 || lines[0] != kMagic) malformed("missing 'SSIMDECOMP-CODES 1' header");
  CodesFile codes;
  codes.header = parse_header(lines[1]);
  const std::size_t expected = codes.header.blocks_x() * codes.header.blocks_y();
  if (lines.size() - 2 != expected) {
    malformed("expected " + std::to_string(expected) + " block records, found " + std::to_string(lines.size() - 2));
  }
  codes.records.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    BlockCode rec = parse_record(lines[i + 2]);
    if (rec.index != i) malformed("record " + std::to_string(i) + " carries index " + std::to_string(rec.index));
    if (rec.atoms.size() != rec.coeffs.size()) malformed("atom and coefficient counts differ");
    if (rec.atoms.size() > codes.header.sparsity) malformed("record uses more atoms than the sparsity");
    codes.records.push_back(std::move(rec));
  }
  return codes;
}

CodesFile read_codes_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_codes(ss.str());
}

void write_codes_file(const CodesFile& codes, const std::string& path) {
  const std::string text = save_codes(codes);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(Errc::Io, "failed writing '" + path + "'");
}

DecomposeResult decompose_image(const GrayImage& img, const Dictionary& dict, const DecomposeOptions& opts) {
  const auto l = dict.block_edge();
  if (!l) {
    throw Error(Errc::InvalidArgument,
                "dictionary atom length " + std::to_string(dict.atom_length()) + " is not a square block");
  }
  if (opts.sparsity == 0 || opts.sparsity > dict.size()) {
    throw Error(Errc::InvalidArgument, "sparsity must be in [1, " + std::to_string(dict.size()) + "]");
  }
  if (opts.coeffs == CostKind::PCC) throw Error(Errc::InvalidArgument, "coefficients come from mse or ssim");

  const BlockGrid grid = tile(img, *l);
  const std::size_t count = grid.blocks.size();

  struct Outcome {
    BlockCode code;
    double mse = 0.0;
    double ssim = 0.0;
    double pcc = 0.0;
    bool constant = false;
    bool degenerate = false;
  };
  std::vector<Outcome> outcomes(count);

  parallel_for(count, opts.threads, [&](std::size_t b) {
    const Block& y = grid.blocks[b];
    Outcome& out = outcomes[b];
    out.code.index = b;
    const BlockStats ys = stats(y);
    if (is_zero_variance(ys)) {
      out.code.offset = ys.mean;
      out.constant = true;
      out.mse = mse(Block(std::vector<double>(y.size(), ys.mean)), y);
      return;
    }
    try {
      const SelectionResult sel = opts.search == SearchKind::greedy
                                      ? greedy_select(dict, y, opts.sparsity, opts.cost)
                                      : exhaustive_select(dict, y, opts.sparsity, opts.cost);
      const Decomposition d = opts.coeffs == CostKind::SSIM ? solve_ssim(dict, sel.subset, y, opts.orientation)
                                                            : solve_mse(dict, sel.subset, y);
      out.code.atoms = d.subset.indices();
      out.code.coeffs = d.coeffs;
      out.code.offset = d.offset;
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateCorrelation) throw;
      out.code.atoms.clear();
      out.code.coeffs.clear();
      out.code.offset = ys.mean;
      out.degenerate = true;
    }
    std::vector<double> x(y.size(), out.code.offset);
    for (std::size_t k = 0; k < out.code.atoms.size(); ++k) {
      const Block& atom = dict.atom(out.code.atoms[k]);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += out.code.coeffs[k] * atom[i];
    }
    const Block xb(std::move(x));
    out.mse = mse(xb, y);
    out.ssim = abs_ssim_or_zero(xb, y);
    out.pcc = is_constant(xb) ? 0.0 : std::abs(pcc(xb, y));
  });

  DecomposeResult result;
  CodesHeader& h = result.codes.header;
  h.block_edge = *l;
  h.width = img.width;
  h.height = img.height;
  h.pad_right = grid.pad_right;
  h.pad_bottom = grid.pad_bottom;
  h.sparsity = opts.sparsity;
  h.cost = opts.cost;
  h.dict_checksum = dictionary_checksum(dict);

  double sum_mse = 0.0;
  double sum_ssim = 0.0;
  double sum_pcc = 0.0;
  std::size_t varied = 0;
  for (Outcome& o : outcomes) {
    sum_mse += o.mse;
    result.block_mse.push_back(o.mse);
    if (o.constant) {
      ++result.constant_blocks;
    } else {
      sum_ssim += o.ssim;
      sum_pcc += o.pcc;
      ++varied;
    }
    if (o.degenerate) ++result.degenerate_blocks;
    result.codes.records.push_back(std::move(o.code));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  result.mean_mse = sum_mse / static_cast<double>(count);
  result.mean_ssim = varied ? sum_ssim / static_cast<double>(varied) : nan;
  result.mean_pcc = varied ? sum_pcc / static_cast<double>(varied) : nan;
  return result;
}

GrayImage reconstruct_image(const CodesFile& codes, const Dictionary& dict) {
  const CodesHeader& h = codes.header;
  if (dictionary_checksum(dict) != h.dict_checksum) {
    throw Error(Errc::ChecksumMismatch, "dictionary checksum does not match the codes header");
  }
  if (dict.block_edge() != h.block_edge) {
    throw Error(Errc::DimensionMismatch, "dictionary block edge does not match the codes header");
  }
  BlockGrid grid;
  grid.block_edge = h.block_edge;
  grid.blocks_x = h.blocks_x();
  grid.blocks_y = h.blocks_y();
  grid.pad_right = h.pad_right;
  grid.pad_bottom = h.pad_bottom;
  grid.blocks.reserve(codes.records.size());
  for (const BlockCode& rec : codes.records) {
    std::vector<double> x(dict.atom_length(), rec.offset);
    for (std::size_t k = 0; k < rec.atoms.size(); ++k) {
      if (rec.atoms[k] >= dict.size()) {
        throw Error(Errc::IndexOutOfRange, "block " + std::to_string(rec.index) + " references atom " +
                                               std::to_string(rec.atoms[k]));
      }
      const Block& atom = dict.atom(rec.atoms[k]);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += rec.coeffs[k] * atom[i];
    }
    grid.blocks.emplace_back(std::move(x));
  }
  return untile(grid);
}

}  // namespace ssimdecomp
