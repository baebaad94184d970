#include "ssimdecomp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ssimdecomp/error.hpp"
#include "ssimdecomp/solvers.hpp"

namespace ssimdecomp {

namespace {

double abs_ssim_of(const Block& x, const Block& y) {
  try {
    return std::abs(ssim(x, y));
  } catch (const Error& e) {
    // Both means zero: the luminance factor is 1 because the offset rule
    // equalises the means, leaving the reduced form.
    if (e.code() != Errc::DegenerateInput) throw;
    return std::abs(ssim_reduced(x, y));
  }
}

void check_request(const Dictionary& dict, const Block& y, std::size_t m) {
  if (y.size() != dict.atom_length()) {
    throw Error(Errc::DimensionMismatch, "target length does not match atom length");
  }
  if (m == 0 || m > dict.size()) {
    throw Error(Errc::InvalidArgument,
                "sparsity " + std::to_string(m) + " must be in [1, " + std::to_string(dict.size()) + "]");
  }
  if (is_constant(y)) throw Error(Errc::ZeroVarianceTarget, "target block has zero variance");
}

// Outcome of trying one candidate subset during a search.
enum class Attempt { ok, singular, degenerate };

struct Evaluated {
  Attempt status = Attempt::ok;
  CostValue cost;
};

Evaluated try_evaluate(const Dictionary& dict, const AtomSubset& subset, const Block& y, CostKind kind) {
  try {
    return {Attempt::ok, evaluate_cost(dict, subset, y, kind)};
  } catch (const Error& e) {
    if (e.code() == Errc::NearSingular) return {Attempt::singular, {}};
    if (e.code() == Errc::DegenerateCorrelation) return {Attempt::degenerate, {}};
    throw;
  }
}

[[noreturn]] void throw_no_candidates(bool saw_degenerate, std::size_t wanted) {
  if (saw_degenerate) {
    throw Error(Errc::DegenerateCorrelation, "no usable atom is correlated with the target");
  }
  throw Error(Errc::NotEnoughUsableAtoms,
              "fewer than " + std::to_string(wanted) + " atoms survive singularity checks");
}

}  // namespace

CostValue evaluate_cost(const Dictionary& dict, const AtomSubset& subset, const Block& y, CostKind cost) {
  switch (cost) {
    case CostKind::MSE: {
      const Decomposition d = solve_mse(dict, subset, y);
      return {mse(reconstruct(dict, d), y), false};
    }
    case CostKind::SSIM: {
      const Decomposition d = solve_ssim(dict, subset, y, Orientation::maximize);
      return {abs_ssim_of(reconstruct(dict, d), y), true};
    }
    case CostKind::PCC: {
      const Decomposition d = solve_mse(dict, subset, y);
      const Block x = reconstruct(dict, d);
      try {
        return {std::abs(pcc(x, y)), true};
      } catch (const Error& e) {
        if (e.code() != Errc::ZeroVariance) throw;
        throw Error(Errc::DegenerateCorrelation, "least-squares fit is constant; correlation undefined");
      }
    }
  }
  throw Error(Errc::InvalidArgument, "unknown cost kind");
}

double cost_scale(CostKind cost, double target_variance) noexcept {
  return cost == CostKind::MSE ? target_variance : 1.0;
}

bool strictly_better(const CostValue& a, const CostValue& b, double rel_tol, double scale) noexcept {
  const double gain = a.higher_is_better ? a.value - b.value : b.value - a.value;
  return gain > rel_tol * std::max({std::abs(a.value), std::abs(b.value), scale});
}

bool costs_tie(const CostValue& a, const CostValue& b, double rel_tol, double scale) noexcept {
  return !strictly_better(a, b, rel_tol, scale) && !strictly_better(b, a, rel_tol, scale);
}

std::uint64_t binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step.
    const std::uint64_t f = n - k + i;
    if (r > kMax / f) return kMax;
    r = r * f / i;
  }
  return r;
}

SelectionResult greedy_select(const Dictionary& dict, const Block& y, std::size_t m, CostKind cost) {
  check_request(dict, y, m);
  const double scale = cost_scale(cost, stats(y).variance);

  std::vector<std::size_t> chosen;
  std::vector<bool> used(dict.size(), false);
  std::vector<double> step_scores;
  CostValue last{};

  for (std::size_t step = 0; step < m; ++step) {
    std::optional<std::size_t> best;
    CostValue best_cost{};
    bool saw_degenerate = false;
    chosen.push_back(0);
    for (std::size_t j = 0; j < dict.size(); ++j) {
      if (used[j]) continue;
      chosen.back() = j;
      const Evaluated ev = try_evaluate(dict, AtomSubset(chosen), y, cost);
      if (ev.status == Attempt::degenerate) saw_degenerate = true;
      if (ev.status != Attempt::ok) continue;
      if (!best || strictly_better(ev.cost, best_cost, kSelectionTieTolerance, scale)) {
        best = j;
        best_cost = ev.cost;
      }
    }
    if (!best) throw_no_candidates(saw_degenerate, m);
    chosen.back() = *best;
    used[*best] = true;
    last = best_cost;
    step_scores.push_back(score(assemble(dict, AtomSubset(chosen), y)));
  }
  return {AtomSubset(std::move(chosen)), std::move(step_scores), last, cost};
}

SelectionResult exhaustive_select(const Dictionary& dict, const Block& y, std::size_t m, CostKind cost) {
  check_request(dict, y, m);
  const std::size_t n = dict.size();
  const std::uint64_t count = binomial(n, m);
  if (count > kMaxEnumeratedSubsets) {
    throw Error(Errc::CombinatorialBlowup, "C(" + std::to_string(n) + ", " + std::to_string(m) +
                                               ") subsets exceed the enumeration limit");
  }
  const double scale = cost_scale(cost, stats(y).variance);

  std::vector<std::size_t> combo(m);
  for (std::size_t k = 0; k < m; ++k) combo[k] = k;
  std::optional<std::vector<std::size_t>> best;
  CostValue best_cost{};
  bool saw_degenerate = false;

  // Lexicographic enumeration, so a strict-improvement rule keeps the
  // smallest subset among ties.
  while (true) {
    const Evaluated ev = try_evaluate(dict, AtomSubset(combo), y, cost);
    if (ev.status == Attempt::degenerate) saw_degenerate = true;
    if (ev.status == Attempt::ok && (!best || strictly_better(ev.cost, best_cost, kSelectionTieTolerance, scale))) {
      best = combo;
      best_cost = ev.cost;
    }
    std::size_t k = m;
    while (k > 0 && combo[k - 1] == n - m + (k - 1)) --k;
    if (k == 0) break;
    ++combo[k - 1];
    for (std::size_t t = k; t < m; ++t) combo[t] = combo[t - 1] + 1;
  }
  if (!best) throw_no_candidates(saw_degenerate, m);
  AtomSubset subset(std::move(*best));
  const double s = score(assemble(dict, subset, y));
  return {std::move(subset), {s}, best_cost, cost};
}

}  // namespace ssimdecomp
