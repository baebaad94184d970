#include "ssimdecomp/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "ssimdecomp/error.hpp"

namespace ssimdecomp {

namespace {

class PgmScanner {
 public:
  explicit PgmScanner(std::string_view bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments that run to end of line.
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::optional<unsigned long> next_number() {
    skip_separators();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ == start) return std::nullopt;
    unsigned long value = 0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
    if (ec != std::errc()) return std::nullopt;
    return value;
  }

  bool at_separator() const {
    return pos_ < bytes_.size() &&
           (std::isspace(static_cast<unsigned char>(bytes_[pos_])) || bytes_[pos_] == '#');
  }

  std::size_t& pos() { return pos_; }
  std::string_view bytes() const { return bytes_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int quantize(double v) {
  const double r = std::round(v);
  return static_cast<int>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

GrayImage read_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw Error(Errc::MalformedHeader, "expected a P2 or P5 magic number");
  }
  const bool binary = bytes[1] == '5';
  PgmScanner scan(bytes);
  scan.pos() = 2;
  if (!scan.at_separator()) throw Error(Errc::MalformedHeader, "magic number must be followed by whitespace");

  const auto width = scan.next_number();
  const auto height = scan.next_number();
  const auto maxval = scan.next_number();
  if (!width || !height || !maxval) throw Error(Errc::MalformedHeader, "missing width, height or maxval");
  if (*width == 0 || *height == 0) throw Error(Errc::MalformedHeader, "image dimensions must be positive");
  if (*maxval == 0) throw Error(Errc::MalformedHeader, "maxval must be positive");
  if (*maxval > 255) throw Error(Errc::UnsupportedMaxval, "maxval " + std::to_string(*maxval) + " exceeds 255");

  GrayImage img;
  img.width = *width;
  img.height = *height;
  const std::size_t count = img.width * img.height;
  img.pixels.reserve(count);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t& pos = scan.pos();
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      throw Error(Errc::MalformedHeader, "maxval must be followed by a single whitespace byte");
    }
    ++pos;
    if (bytes.size() - pos < count) {
      throw Error(Errc::TruncatedData, "expected " + std::to_string(count) + " raster bytes, found " +
                                           std::to_string(bytes.size() - pos));
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = static_cast<unsigned char>(bytes[pos + i]);
      if (v > *maxval) throw Error(Errc::InvalidSample, "sample exceeds maxval");
      img.pixels.push_back(v);
    }
    return img;
  }

  for (std::size_t i = 0; i < count; ++i) {
    const auto v = scan.next_number();
    if (!v) {
      scan.skip_separators();
      if (scan.pos() >= bytes.size()) {
        throw Error(Errc::TruncatedData, "expected " + std::to_string(count) + " samples, found " +
                                             std::to_string(i));
      }
      throw Error(Errc::InvalidSample, "non-numeric sample in P2 raster");
    }
    if (*v > *maxval) throw Error(Errc::InvalidSample, "sample exceeds maxval");
    img.pixels.push_back(static_cast<double>(*v));
  }
  return img;
}

std::string write_pgm(const GrayImage& img, PgmFormat format) {
  if (img.pixels.size() != img.width * img.height) {
    throw Error(Errc::DimensionMismatch, "pixel count does not match image dimensions");
  }
  std::string out = (format == PgmFormat::P5 ? "P5\n" : "P2\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  if (format == PgmFormat::P5) {
    out.reserve(out.size() + img.pixels.size());
    for (double v : img.pixels) out.push_back(static_cast<char>(static_cast<unsigned char>(quantize(v))));
    return out;
  }
  // One image row per group of lines, wrapped before 70 characters.
  for (std::size_t y = 0; y < img.height; ++y) {
    std::size_t line_len = 0;
    for (std::size_t x = 0; x < img.width; ++x) {
      const std::string token = std::to_string(quantize(img.at(x, y)));
      if (line_len > 0 && line_len + 1 + token.size() > 70) {
        out += '\n';
        line_len = 0;
      }
      if (line_len > 0) {
        out += ' ';
        ++line_len;
      }
      out += token;
      line_len += token.size();
    }
    out += '\n';
  }
  return out;
}

GrayImage read_pgm_file(const std::string& path) { return read_pgm(slurp(path)); }

void write_pgm_file(const GrayImage& img, const std::string& path, PgmFormat format) {
  const std::string bytes = write_pgm(img, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "failed writing '" + path + "'");
}

BlockGrid tile(const GrayImage& img, std::size_t l) {
  if (l < 2) throw Error(Errc::InvalidArgument, "block edge must be at least 2");
  if (img.width == 0 || img.height == 0) throw Error(Errc::ImageSmallerThanBlock, "image is empty");
  if (img.pixels.size() != img.width * img.height) {
    throw Error(Errc::DimensionMismatch, "pixel count does not match image dimensions");
  }
  BlockGrid grid;
  grid.block_edge = l;
  grid.blocks_x = (img.width + l - 1) / l;
  grid.blocks_y = (img.height + l - 1) / l;
  grid.pad_right = grid.blocks_x * l - img.width;
  grid.pad_bottom = grid.blocks_y * l - img.height;
  grid.blocks.reserve(grid.blocks_x * grid.blocks_y);
  for (std::size_t by = 0; by < grid.blocks_y; ++by) {
    for (std::size_t bx = 0; bx < grid.blocks_x; ++bx) {
      std::vector<double> samples;
      samples.reserve(l * l);
      for (std::size_t dy = 0; dy < l; ++dy) {
        const std::size_t y = std::min(by * l + dy, img.height - 1);
        for (std::size_t dx = 0; dx < l; ++dx) {
          const std::size_t x = std::min(bx * l + dx, img.width - 1);
          samples.push_back(img.at(x, y));
        }
      }
      grid.blocks.emplace_back(std::move(samples));
    }
  }
  return grid;
}

GrayImage untile(const BlockGrid& grid) {
  const std::size_t l = grid.block_edge;
  if (l < 2 || grid.blocks_x == 0 || grid.blocks_y == 0) {
    throw Error(Errc::InconsistentGrid, "grid has no blocks or an invalid block edge");
  }
  if (grid.blocks.size() != grid.blocks_x * grid.blocks_y) {
    throw Error(Errc::InconsistentGrid, "grid holds " + std::to_string(grid.blocks.size()) + " blocks, expected " +
                                            std::to_string(grid.blocks_x * grid.blocks_y));
  }
  if (grid.pad_right >= l || grid.pad_bottom >= l) {
    throw Error(Errc::InconsistentGrid, "padding must be smaller than the block edge");
  }
  GrayImage img;
  img.width = grid.blocks_x * l - grid.pad_right;
  img.height = grid.blocks_y * l - grid.pad_bottom;
  img.pixels.assign(img.width * img.height, 0.0);
  for (std::size_t b = 0; b < grid.blocks.size(); ++b) {
    const Block& block = grid.blocks[b];
    if (block.size() != l * l) throw Error(Errc::InconsistentGrid, "block length does not match l*l");
    const std::size_t bx = b % grid.blocks_x;
    const std::size_t by = b / grid.blocks_x;
    for (std::size_t dy = 0; dy < l; ++dy) {
      const std::size_t y = by * l + dy;
      if (y >= img.height) break;
      for (std::size_t dx = 0; dx < l; ++dx) {
        const std::size_t x = bx * l + dx;
        if (x >= img.width) break;
        img.pixels[y * img.width + x] = block[dy * l + dx];
      }
    }
  }
  return img;
}

}  // namespace ssimdecomp
