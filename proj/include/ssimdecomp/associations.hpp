#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssimdecomp/blockstats.hpp"
#include "ssimdecomp/dictionary.hpp"

namespace ssimdecomp {

enum class Distribution { uniform01, gaussian01, image_patches };

struct TrialConfig {
  std::uint64_t seed = 0;
  std::size_t p = 16;        ///< block length (a perfect square for image_patches)
  std::size_t n = 10;        ///< atoms per trial
  std::size_t m = 3;         ///< sparsity
  std::size_t trials = 100;
  Distribution distribution = Distribution::gaussian01;
  std::string image_path;    ///< source PGM for image_patches
  double tolerance = 1e-9;   ///< relative tolerance for every identity and tie
  unsigned threads = 0;      ///< 0 = hardware concurrency

  /// Throws InvalidArgument unless 1 <= m <= n, p >= 2 and trials >= 1.
  void validate() const;
};

/// One random problem: a dictionary, a target, and a probe subset (seeded
/// random m-subset) on which subset-independent identities are checked.
struct TrialInstance {
  Dictionary dict;
  Block target;
  std::vector<std::size_t> probe;
};

/// Deterministic in (cfg, index); independent of thread count.
TrialInstance generate_trial(const TrialConfig& cfg, std::size_t index);

struct TrialOutcome {
  enum class Status { pass, fail, skipped };
  Status status = Status::pass;
  double deviation = 0.0;   ///< worst relative deviation seen in the trial
  bool tie = false;         ///< passed only because distinct optima tie in cost
  std::string skip_reason;  ///< error name when skipped
  std::string detail;       ///< first failing assertion, for diagnostics
};

// Single-trial checks. Degenerate inputs come back as skipped, never failed.
TrialOutcome selection_equivalence_trial(const Dictionary& dict, const Block& y, std::size_t m, double tol);
TrialOutcome cost_equivalence_trial(const Dictionary& dict, const Block& y, std::size_t m, double tol);
TrialOutcome coefficient_ratio_trial(const Dictionary& dict, const Block& y, const std::vector<std::size_t>& subset,
                                     double tol);
TrialOutcome identities_trial(const Dictionary& dict, const Block& y, const std::vector<std::size_t>& subset,
                              double tol);

struct CheckReport {
  std::string name;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skipped = 0;
  std::size_t ties = 0;
  double worst_deviation = 0.0;
  std::map<std::string, std::size_t> skip_reasons;
  std::vector<std::size_t> failed_trials;
  std::string first_failure;

  std::size_t trials() const noexcept { return pass + fail + skipped; }
  /// Passed if nothing failed and at least one trial was actually checked.
  bool ok() const noexcept { return fail == 0 && pass > 0; }
};

struct AssocReport {
  TrialConfig config;
  std::vector<CheckReport> checks;
  double seconds = 0.0;

  bool ok() const noexcept;
};

enum class Check { selection, cost, ratio, identities };

/// Exhaustive MSE and SSIM optima agree (cost ties within tolerance allowed).
AssocReport check_selection_equivalence(const TrialConfig& cfg);
/// |r(x_MSE, y)| = |r(x_SSIM, y)|, and the MSE optimum also maximizes |pcc| and |SSIM|.
AssocReport check_cost_equivalence(const TrialConfig& cfg);
/// s_MSE[k] / s_SSIM[k] = r(x_MSE, y) (and -r under the minimize orientation).
AssocReport check_coefficient_ratio(const TrialConfig& cfg);
/// var(x) = cov(x,y) and mse = var(y)(1-r^2) for MSE; var(x) = var(y) and
/// cov(x,y)^2 = var(y) * score for SSIM.
AssocReport check_identities(const TrialConfig& cfg);

AssocReport run_checks(const TrialConfig& cfg, const std::vector<Check>& checks);

/// One "<check>: <pass>/<fail>/<skipped> <worst>" line per check,
/// then a key=value trailer.
std::string format_report(const AssocReport& report);

std::string_view to_string(Check check) noexcept;

}  // namespace ssimdecomp
