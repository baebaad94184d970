#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ssimdecomp/blockstats.hpp"
#include "ssimdecomp/cost_kind.hpp"
#include "ssimdecomp/covsys.hpp"
#include "ssimdecomp/dictionary.hpp"

namespace ssimdecomp {

/// A cost value together with the direction in which it improves.
struct CostValue {
  double value = 0.0;
  bool higher_is_better = false;
};

/// Cost of the closed-form solution on `subset`:
///   MSE  -> mse of the solve_mse reconstruction (lower is better)
///   SSIM -> |SSIM| of the solve_ssim (maximize) reconstruction (higher is better)
///   PCC  -> |pcc| of the solve_mse reconstruction (higher is better)
/// Solver errors propagate; a constant MSE reconstruction under PCC raises
/// DegenerateCorrelation.
CostValue evaluate_cost(const Dictionary& dict, const AtomSubset& subset, const Block& y, CostKind cost);

/// Magnitude below which two costs of kind `cost` for a target of variance
/// `target_variance` are compared relatively: MSE costs scale with the
/// target variance, |SSIM| and |pcc| live in [0, 1].
double cost_scale(CostKind cost, double target_variance) noexcept;

/// True when `a` improves on `b` by more than rel_tol * max(|a|, |b|, scale).
bool strictly_better(const CostValue& a, const CostValue& b, double rel_tol, double scale) noexcept;

/// True when neither cost improves on the other beyond the tolerance.
bool costs_tie(const CostValue& a, const CostValue& b, double rel_tol, double scale) noexcept;

struct SelectionResult {
  AtomSubset subset;                 ///< selection order (greedy) or ascending (exhaustive)
  std::vector<double> step_scores;   ///< sigma_y^T sigma^-1 sigma_y after each step
  CostValue final_cost;
  CostKind cost = CostKind::MSE;
};

/// Relative tolerance under which candidate costs are considered equal when
/// selecting; ties go to the lowest atom index (greedy) or the
/// lexicographically smallest subset (exhaustive).
inline constexpr double kSelectionTieTolerance = 1e-12;

/// Largest number of subsets exhaustive_select will enumerate.
inline constexpr std::uint64_t kMaxEnumeratedSubsets = 1'000'000;

/// Greedy forward selection: each step adds the atom whose inclusion gives
/// the best actual cost. Candidates whose system is NearSingular (or, under
/// SSIM/PCC, uncorrelated with the target) are skipped.
SelectionResult greedy_select(const Dictionary& dict, const Block& y, std::size_t m, CostKind cost);

/// Brute-force optimum over every m-subset. Throws CombinatorialBlowup when
/// C(n, m) exceeds kMaxEnumeratedSubsets.
SelectionResult exhaustive_select(const Dictionary& dict, const Block& y, std::size_t m, CostKind cost);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k) noexcept;

}  // namespace ssimdecomp
