#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ssimdecomp/error.hpp"
#include "ssimdecomp/dictionary.hpp"
#include "ssimdecomp/imageio.hpp"

using namespace ssimdecomp;
using doctest::Approx;

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

double dot(const Block& a, const Block& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_SUITE("dictionary") {
  TEST_CASE("construction checks") {
    CHECK(code_of([] { Dictionary({}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { Dictionary({Block({1, 2}), Block({1, 2, 3})}); }) == Errc::DimensionMismatch);
    CHECK(code_of([] { Dictionary({Block({1, 2}), Block({4, 4})}); }) == Errc::ZeroVarianceAtom);
    const Dictionary d({Block({1, 2, 3, 5})});
    CHECK(d.block_edge() == std::optional<std::size_t>(2));
    CHECK_FALSE(Dictionary({Block({1, 2, 3})}).block_edge().has_value());
  }

  TEST_CASE("dct atoms are orthonormal and zero-mean") {
    for (std::size_t l : {2, 4, 8}) {
      const Dictionary d = build_dct(l);
      REQUIRE(d.size() == l * l - 1);
      CHECK(d.atom_length() == l * l);
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(stats(d.atom(i)).mean) <= 1e-12);
        for (std::size_t j = 0; j < d.size(); ++j)
          CHECK(std::abs(dot(d.atom(i), d.atom(j)) - (i == j ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }

  TEST_CASE("dct atoms plus the mean span every block") {
    std::mt19937_64 rng(9);
    const Dictionary d = build_dct(4);
    const std::vector<double> y = oracle::gaussian_vector(rng, 16);
    const double mu = oracle::mean(y);
    std::vector<double> x(16, mu);
    for (const Block& a : d.atoms()) {
      const double c = dot(a, Block(y));
      for (std::size_t i = 0; i < 16; ++i) x[i] += c * a[i];
    }
    for (std::size_t i = 0; i < 16; ++i) CHECK(x[i] == Approx(y[i]).epsilon(1e-12));
  }

  TEST_CASE("dct frequency layout") {
    const Dictionary d = build_dct(2);
    // Atom 0 is u=1, v=0: varies along x only.
    CHECK(d.atom(0)[0] == Approx(0.5));
    CHECK(d.atom(0)[1] == Approx(-0.5));
    CHECK(d.atom(0)[2] == Approx(0.5));
    // Atom 1 is u=0, v=1: varies along y only.
    CHECK(d.atom(1)[0] == Approx(0.5));
    CHECK(d.atom(1)[1] == Approx(0.5));
    CHECK(d.atom(1)[2] == Approx(-0.5));
    CHECK(code_of([] { build_dct(1); }) == Errc::InvalidArgument);
  }

  TEST_CASE("random patches") {
    GrayImage img{8, 8, std::vector<double>(64)};
    for (std::size_t i = 0; i < 64; ++i) img.pixels[i] = static_cast<double>((i * 37) % 256);
    const Dictionary a = build_random_patches(img, 4, 6, 11);
    const Dictionary b = build_random_patches(img, 4, 6, 11);
    CHECK(a.size() == 6);
    CHECK(a.atom_length() == 16);
    CHECK(a.atoms() == b.atoms());
    CHECK(a.provenance() == b.provenance());
    CHECK(code_of([&] { build_random_patches(img, 9, 2, 0); }) == Errc::ImageSmallerThanBlock);
    const GrayImage flat{8, 8, std::vector<double>(64, 3.0)};
    CHECK(code_of([&] { build_random_patches(flat, 4, 2, 0); }) == Errc::TooManyConstantPatches);
  }

  TEST_CASE("save and load round trip exactly") {
    std::mt19937_64 rng(4);
    std::vector<Block> atoms;
    for (int i = 0; i < 5; ++i) atoms.emplace_back(oracle::gaussian_vector(rng, 9));
    const Dictionary d(atoms, "random\nline");
    const std::string text = save_dictionary(d);
    const Dictionary back = load_dictionary(text);
    CHECK(back.atoms() == d.atoms());
    CHECK(back.provenance() == d.provenance());
    CHECK(save_dictionary(back) == text);
    CHECK(dictionary_checksum(back) == dictionary_checksum(d));
    CHECK(dictionary_checksum(build_dct(2)) != dictionary_checksum(build_dct(3)));
  }

  TEST_CASE("load errors") {
    CHECK(code_of([] { load_dictionary("NOPE 1\n1 2\n1 2\n"); }) == Errc::MalformedDictFile);
    CHECK(code_of([] { load_dictionary("SSIMDECOMP-DICT 1\n2 2\n1 2\n"); }) == Errc::MalformedDictFile);
    CHECK(code_of([] { load_dictionary("SSIMDECOMP-DICT 1\n1 2\n1 2 3\n"); }) == Errc::MalformedDictFile);
    CHECK(code_of([] { load_dictionary("SSIMDECOMP-DICT 1\n1 2\n1 x\n"); }) == Errc::MalformedDictFile);
    CHECK(code_of([] { load_dictionary("SSIMDECOMP-DICT 1\n1 2\n4 4\n"); }) == Errc::ZeroVarianceAtom);
    const Dictionary ok = load_dictionary("SSIMDECOMP-DICT 1\n# note\n\n1 2\n1 2\n");
    CHECK(ok.atom(0) == Block({1, 2}));
  }

  TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }
}
