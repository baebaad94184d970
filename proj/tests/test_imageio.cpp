#include <doctest.h>

#include <random>
#include <string>

#include "ssimdecomp/error.hpp"
#include "ssimdecomp/imageio.hpp"

using namespace ssimdecomp;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ssimdecomp::Error");
  return Errc::Io;
}

GrayImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img{w, h, std::vector<double>(w * h)};
  for (double& v : img.pixels) v = px(rng);
  return img;
}

}  // namespace

TEST_SUITE("imageio") {
  TEST_CASE("ascii and binary parse to the same image") {
    const GrayImage a = read_pgm("P2\n2 2\n255\n0 255\n128 64\n");
    CHECK(a.width == 2);
    CHECK(a.height == 2);
    CHECK(a.pixels == std::vector<double>{0, 255, 128, 64});
    const std::string bin = std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4);
    CHECK(read_pgm(bin) == a);
    CHECK(read_pgm("P2 # comment\n2 # w\n2\n255\n0 255 128 64") == a);
  }

  TEST_CASE("header and data errors") {
    CHECK(code_of([] { read_pgm("P3\n1 1\n255\n0 0 0\n"); }) == Errc::MalformedHeader);
    CHECK(code_of([] { read_pgm("P2\n0 2\n255\n"); }) == Errc::MalformedHeader);
    CHECK(code_of([] { read_pgm("P2\n1 1\n0\n0\n"); }) == Errc::MalformedHeader);
    CHECK(code_of([] { read_pgm("P2\n1 1\n65535\n0\n"); }) == Errc::UnsupportedMaxval);
    CHECK(code_of([] { read_pgm("P2\n2 2\n255\n1 2 3\n"); }) == Errc::TruncatedData);
    CHECK(code_of([] { read_pgm(std::string("P5\n2 2\n255\n\x01\x02", 13)); }) == Errc::TruncatedData);
    CHECK(code_of([] { read_pgm("P2\n1 1\n100\n101\n"); }) == Errc::InvalidSample);
    CHECK(code_of([] { read_pgm("P2\n1 1\n255\nx\n"); }) == Errc::InvalidSample);
  }

  TEST_CASE("writer rounds and clamps") {
    const GrayImage img{4, 1, {127.5, -3.2, 300.0, 0.49}};
    const GrayImage back = read_pgm(write_pgm(img, PgmFormat::P5));
    CHECK(back.pixels == std::vector<double>{128, 0, 255, 0});
    CHECK(read_pgm(write_pgm(img, PgmFormat::P2)) == back);
    CHECK(write_pgm(GrayImage{2, 1, {1, 2}}, PgmFormat::P5) == std::string("P5\n2 1\n255\n\x01\x02", 13));
  }

  TEST_CASE("write read round trip") {
    std::mt19937_64 rng(5);
    for (std::size_t w : {1, 3, 40}) {
      for (std::size_t h : {1, 7}) {
        const GrayImage img = random_image(rng, w, h);
        CHECK(read_pgm(write_pgm(img, PgmFormat::P5)) == img);
        const std::string ascii = write_pgm(img, PgmFormat::P2);
        CHECK(read_pgm(ascii) == img);
        for (std::size_t start = 0, nl; (nl = ascii.find('\n', start)) != std::string::npos; start = nl + 1)
          CHECK(nl - start <= 70);
      }
    }
  }

  TEST_CASE("tile and untile round trip") {
    std::mt19937_64 rng(77);
    for (std::size_t l : {2, 4, 8}) {
      for (std::size_t w = 1; w <= 32; ++w) {
        const std::size_t h = 1 + (w * 7) % 32;
        const GrayImage img = random_image(rng, w, h);
        const BlockGrid grid = tile(img, l);
        CHECK(grid.blocks_x * l == w + grid.pad_right);
        CHECK(grid.blocks_y * l == h + grid.pad_bottom);
        CHECK(grid.pad_right < l);
        CHECK(grid.pad_bottom < l);
        CHECK(grid.blocks.size() == grid.blocks_x * grid.blocks_y);
        CHECK(untile(grid) == img);
      }
    }
  }

  TEST_CASE("edge replication") {
    GrayImage img{5, 4, std::vector<double>(20)};
    for (std::size_t i = 0; i < 20; ++i) img.pixels[i] = static_cast<double>(i);
    const BlockGrid grid = tile(img, 4);
    CHECK(grid.blocks_x == 2);
    CHECK(grid.blocks_y == 1);
    CHECK(grid.pad_right == 3);
    CHECK(grid.pad_bottom == 0);
    const Block& right = grid.blocks[1];
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t x = 0; x < 4; ++x) CHECK(right[y * 4 + x] == img.at(4, y));
  }

  TEST_CASE("tile errors") {
    const GrayImage img{4, 4, std::vector<double>(16, 1.0)};
    CHECK(code_of([&] { tile(img, 1); }) == Errc::InvalidArgument);
    CHECK(code_of([] { tile(GrayImage{}, 2); }) == Errc::ImageSmallerThanBlock);
    BlockGrid grid = tile(img, 2);
    grid.blocks.pop_back();
    CHECK(code_of([&] { untile(grid); }) == Errc::InconsistentGrid);
    grid = tile(img, 2);
    grid.pad_right = 2;
    CHECK(code_of([&] { untile(grid); }) == Errc::InconsistentGrid);
  }
}
