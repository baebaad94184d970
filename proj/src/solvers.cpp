#include "ssimdecomp/solvers.hpp"

#include <cmath>
#include <string>

#include "ssimdecomp/error.hpp"

namespace ssimdecomp {

std::string_view to_string(CostKind kind) noexcept {
  switch (kind) {
    case CostKind::MSE: return "mse";
    case CostKind::SSIM: return "ssim";
    case CostKind::PCC: return "pcc";
  }
  return "mse";
}

std::optional<CostKind> parse_cost_kind(std::string_view text) noexcept {
  if (text == "mse" || text == "MSE") return CostKind::MSE;
  if (text == "ssim" || text == "SSIM") return CostKind::SSIM;
  if (text == "pcc" || text == "PCC") return CostKind::PCC;
  return std::nullopt;
}

namespace {

double offset_for(const Dictionary& dict, const AtomSubset& subset, const std::vector<double>& coeffs,
                  double target_mean) {
  double o = target_mean;
  for (std::size_t k = 0; k < subset.size(); ++k) o -= coeffs[k] * stats(dict.atom(subset[k])).mean;
  return o;
}

template <typename F>
std::optional<double> try_metric(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

void measure(const Dictionary& dict, Decomposition& d, const Block& y) {
  const Block x = reconstruct(dict, d);
  d.achieved.mse = mse(x, y);
  d.achieved.ssim = try_metric([&] { return ssim(x, y); });
  d.achieved.pcc = try_metric([&] { return pcc(x, y); });
}

Decomposition solve_mse(const Dictionary& dict, const AtomSubset& subset, const Block& y) {
  const CovSystem sys = assemble(dict, subset, y);
  std::vector<double> coeffs = solve_weights(sys);
  const double o = offset_for(dict, subset, coeffs, stats(y).mean);
  Decomposition d{subset, std::move(coeffs), o, CostKind::MSE, {}};
  measure(dict, d, y);
  return d;
}

Decomposition solve_ssim(const Dictionary& dict, const AtomSubset& subset, const Block& y,
                         Orientation orientation) {
  const BlockStats ys = stats(y);
  if (is_zero_variance(ys)) throw Error(Errc::ZeroVarianceTarget, "ssim scheme needs a non-constant target");
  const CovSystem sys = assemble(dict, subset, y);
  const SolvedSystem solved = solve_system(sys);
  if (!(solved.score > 1e-12 * sys.sigma_y2())) {
    throw Error(Errc::DegenerateCorrelation, "target is uncorrelated with the selected atoms");
  }
  // sigma_xy = +-sigma_y * sqrt(score); s = (sigma_y^2 / sigma_xy) sigma^-1 sigma_y.
  const double sigma_xy = std::sqrt(sys.sigma_y2() * solved.score);
  const double scale = (orientation == Orientation::maximize ? 1.0 : -1.0) * sys.sigma_y2() / sigma_xy;
  std::vector<double> coeffs(solved.weights.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = scale * solved.weights[k];
  const double o = offset_for(dict, subset, coeffs, ys.mean);
  Decomposition d{subset, std::move(coeffs), o, CostKind::SSIM, {}};
  measure(dict, d, y);
  return d;
}

Block reconstruct(const Dictionary& dict, const Decomposition& d) {
  d.subset.validate_for(dict.size());
  if (d.coeffs.size() != d.subset.size()) {
    throw Error(Errc::DimensionMismatch, "coefficient count " + std::to_string(d.coeffs.size()) +
                                             " does not match subset size " + std::to_string(d.subset.size()));
  }
  std::vector<double> x(dict.atom_length(), d.offset);
  for (std::size_t k = 0; k < d.subset.size(); ++k) {
    const Block& atom = dict.atom(d.subset[k]);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += d.coeffs[k] * atom[i];
  }
  return Block(std::move(x));
}

}  // namespace ssimdecomp
