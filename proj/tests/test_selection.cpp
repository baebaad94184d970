#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "ssimdecomp/error.hpp"
#include "ssimdecomp/selection.hpp"
#include "ssimdecomp/solvers.hpp"

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

constexpr CostKind kAllKinds[] = {CostKind::MSE, CostKind::SSIM, CostKind::PCC};

Dictionary random_dictionary(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  std::vector<Block> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.emplace_back(oracle::gaussian_vector(rng, p));
  return Dictionary(std::move(atoms));
}

}  // namespace

TEST_SUITE("selection") {
  TEST_CASE("binomial") {
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(63, 63) == 1);
    CHECK(binomial(5, 7) == 0);
    CHECK(binomial(200, 100) == UINT64_MAX);
  }

  TEST_CASE("evaluate_cost examples") {
    const Dictionary dict({Block({0, 1, 2})});
    const Block y({0, 2, 5});
    const CostValue m = evaluate_cost(dict, AtomSubset({0}), y, CostKind::MSE);
    CHECK_FALSE(m.higher_is_better);
    CHECK(m.value == Approx(1.0 / 18.0).epsilon(1e-12));
    CHECK(evaluate_cost(dict, AtomSubset({0}), y, CostKind::PCC).value == Approx(0.993399267798782854));
    CHECK(evaluate_cost(dict, AtomSubset({0}), y, CostKind::SSIM).value == Approx(0.993399267798782854));

    const Block exact({7, 9, 11});
    CHECK(evaluate_cost(dict, AtomSubset({0}), exact, CostKind::MSE).value == Approx(0.0).epsilon(1e-20));
    CHECK(evaluate_cost(dict, AtomSubset({0}), exact, CostKind::SSIM).value == Approx(1.0));
    CHECK(evaluate_cost(dict, AtomSubset({0}), exact, CostKind::PCC).value == Approx(1.0));

    const Dictionary ortho({Block({1, 0, -1, 0})});
    const Block flat_fit({3, 4, 3, 2});
    CHECK(code_of([&] { evaluate_cost(ortho, AtomSubset({0}), flat_fit, CostKind::PCC); }) ==
          Errc::DegenerateCorrelation);
    CHECK(code_of([&] { evaluate_cost(ortho, AtomSubset({0}), flat_fit, CostKind::SSIM); }) ==
          Errc::DegenerateCorrelation);
  }

  TEST_CASE("a perfect match wins under every cost") {
    const Dictionary dict({Block({1, 4, 2, 8}), Block({3, 1, 4, 1})});
    for (CostKind kind : kAllKinds) {
      CHECK(greedy_select(dict, dict.atom(0), 1, kind).subset == AtomSubset({0}));
      CHECK(exhaustive_select(dict, dict.atom(0), 1, kind).subset == AtomSubset({0}));
    }
  }

  TEST_CASE("forced selections") {
    std::mt19937_64 rng(8);
    const Dictionary dict = random_dictionary(rng, 5, 10);
    const Block y(oracle::gaussian_vector(rng, 10));
    for (CostKind kind : kAllKinds) {
      CHECK(greedy_select(dict, y, 5, kind).subset.sorted() == AtomSubset({0, 1, 2, 3, 4}));
      CHECK(exhaustive_select(dict, y, 5, kind).subset == AtomSubset({0, 1, 2, 3, 4}));
    }
    const Dictionary one({Block({1, 2, 4})});
    CHECK(exhaustive_select(one, Block({0, 1, 1}), 1, CostKind::SSIM).subset == AtomSubset({0}));
  }

  TEST_CASE("exact two-atom representation is found exhaustively") {
    std::mt19937_64 rng(21);
    const Dictionary dict = random_dictionary(rng, 4, 12);
    std::vector<double> y(12);
    for (std::size_t i = 0; i < 12; ++i) y[i] = dict.atom(2)[i] + dict.atom(3)[i];
    const SelectionResult by_mse = exhaustive_select(dict, Block(y), 2, CostKind::MSE);
    CHECK(by_mse.subset == AtomSubset({2, 3}));
    CHECK(by_mse.final_cost.value == Approx(0.0).epsilon(1e-20));
    CHECK(exhaustive_select(dict, Block(y), 2, CostKind::SSIM).subset == AtomSubset({2, 3}));
    CHECK(exhaustive_select(dict, Block(y), 2, CostKind::PCC).subset == AtomSubset({2, 3}));
  }

  TEST_CASE("orthogonal atoms are picked by decreasing sigma_iy^2 / sigma_ii") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> raw;
      for (int i = 0; i < 6; ++i) raw.push_back(oracle::gaussian_vector(rng, 16));
      auto ortho = oracle::centered_orthogonal(raw);
      std::uniform_real_distribution<double> scale(0.5, 3.0);
      std::vector<Block> atoms;
      for (auto& v : ortho) {
        const double s = scale(rng);
        for (double& x : v) x = s * x + 1.0;
        atoms.emplace_back(v);
      }
      const Dictionary dict(std::move(atoms));
      const std::vector<double> yv = oracle::gaussian_vector(rng, 16);
      const Block y(yv);

      std::vector<double> gain(6);
      for (std::size_t i = 0; i < 6; ++i) {
        const double c = oracle::cov(dict.atom(i).data(), yv);
        gain[i] = c * c / oracle::cov(dict.atom(i).data(), dict.atom(i).data());
      }
      std::vector<std::size_t> expected(6);
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      std::sort(expected.begin(), expected.end(), [&](auto a, auto b) { return gain[a] > gain[b]; });
      expected.resize(3);

      for (CostKind kind : kAllKinds) {
        const SelectionResult g = greedy_select(dict, y, 3, kind);
        CHECK(g.subset.indices() == expected);
        CHECK(g.subset.sorted() == exhaustive_select(dict, y, 3, kind).subset);
      }
    }
  }

  TEST_CASE("greedy invariants on random dictionaries") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
      const Dictionary dict = random_dictionary(rng, 9, 16);
      const Block y(oracle::gaussian_vector(rng, 16));
      const double vy = stats(y).variance;

      std::vector<SelectionResult> greedy;
      for (CostKind kind : kAllKinds) {
        const SelectionResult g = greedy_select(dict, y, 4, kind);
        const SelectionResult e = exhaustive_select(dict, y, 4, kind);
        CHECK(std::is_sorted(g.step_scores.begin(), g.step_scores.end()));
        CHECK_FALSE(strictly_better(g.final_cost, e.final_cost, 1e-9, cost_scale(kind, vy)));

        const Block x = reconstruct(dict, solve_mse(dict, g.subset, y));
        CHECK(std::sqrt(g.step_scores.back() / vy) == Approx(std::abs(pcc(x, y))).epsilon(1e-9));
        greedy.push_back(g);
      }
      CHECK(greedy[0].subset == greedy[1].subset);
      CHECK(greedy[0].subset == greedy[2].subset);
      // Deterministic on repeat.
      CHECK(greedy_select(dict, y, 4, CostKind::SSIM).subset == greedy[1].subset);
    }
  }

  TEST_CASE("singular candidates are skipped") {
    const Dictionary dict({Block({0, 1, 3, 2}), Block({0, 2, 6, 4}), Block({1, 0, 0, 2})});
    const Block y({0, 1, 3, 2.5});
    const SelectionResult g = greedy_select(dict, y, 2, CostKind::MSE);
    CHECK(g.subset.sorted() != AtomSubset({0, 1}));
    const Dictionary twins({Block({0, 1, 3, 2}), Block({0, 2, 6, 4})});
    CHECK(code_of([&] { greedy_select(twins, y, 2, CostKind::MSE); }) == Errc::NotEnoughUsableAtoms);
    CHECK(code_of([&] { exhaustive_select(twins, y, 2, CostKind::SSIM); }) == Errc::NotEnoughUsableAtoms);
  }

  TEST_CASE("selection argument checks") {
    const Dictionary dict({Block({0, 1, 3}), Block({1, 0, 0})});
    CHECK(code_of([&] { greedy_select(dict, Block({2, 2, 2}), 1, CostKind::MSE); }) == Errc::ZeroVarianceTarget);
    CHECK(code_of([&] { greedy_select(dict, Block({1, 2, 2}), 3, CostKind::MSE); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { greedy_select(dict, Block({1, 2, 2}), 0, CostKind::MSE); }) == Errc::InvalidArgument);

    std::mt19937_64 rng(3);
    const Dictionary big = random_dictionary(rng, 40, 4);
    CHECK(code_of([&] { exhaustive_select(big, Block({1, 2, 3, 5}), 20, CostKind::MSE); }) ==
          Errc::CombinatorialBlowup);
  }

  TEST_CASE("uncorrelated first step") {
    const Dictionary dict({Block({1, 0, -1, 0}), Block({0, 1, 0, -1})});
    const Block y({1, 5, 1, -3});  // correlated with atom 1 only
    CHECK(greedy_select(dict, y, 1, CostKind::SSIM).subset == AtomSubset({1}));
    const Block flat({2, 3, 2, 3});
    const Dictionary only0({Block({1, 0, -1, 0})});
    CHECK(code_of([&] { greedy_select(only0, flat, 1, CostKind::SSIM); }) == Errc::DegenerateCorrelation);
    CHECK(greedy_select(only0, flat, 1, CostKind::MSE).subset == AtomSubset({0}));
  }
}
