#pragma once

#include <optional>
#include <vector>

#include "ssimdecomp/blockstats.hpp"
#include "ssimdecomp/cost_kind.hpp"
#include "ssimdecomp/covsys.hpp"
#include "ssimdecomp/dictionary.hpp"

namespace ssimdecomp {

/// Metrics between the target and its reconstruction. A metric that is
/// undefined for the pair (pcc against a constant reconstruction, say) is
/// left empty.
struct AchievedMetrics {
  std::optional<double> mse;
  std::optional<double> ssim;
  std::optional<double> pcc;
};

/// x = sum_k coeffs[k] * atom(subset[k]) + offset * 1
struct Decomposition {
  AtomSubset subset;
  std::vector<double> coeffs;
  double offset = 0.0;
  CostKind cost_kind = CostKind::MSE;
  AchievedMetrics achieved;
};

/// Least-squares coefficients s = sigma^-1 sigma_y and offset
/// o = mu_y - sum s_k mu_k. A target uncorrelated with every atom yields the
/// mean-only fit.
Decomposition solve_mse(const Dictionary& dict, const AtomSubset& subset, const Block& y);

/// Stationary point of SSIM: s = +-(sigma_y / sqrt(score)) sigma^-1 sigma_y with the
/// same offset rule, so the reconstruction keeps the target's mean and variance.
/// Throws ZeroVarianceTarget for a constant target and DegenerateCorrelation
/// when score <= 1e-12 * var(y).
Decomposition solve_ssim(const Dictionary& dict, const AtomSubset& subset, const Block& y,
                         Orientation orientation = Orientation::maximize);

Block reconstruct(const Dictionary& dict, const Decomposition& d);

/// Fills `d.achieved` from the reconstruction of `d` against `y`.
void measure(const Dictionary& dict, Decomposition& d, const Block& y);

}  // namespace ssimdecomp
