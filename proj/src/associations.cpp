#include "ssimdecomp/associations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "ssimdecomp/covsys.hpp"
#include "ssimdecomp/error.hpp"
#include "ssimdecomp/imageio.hpp"
#include "ssimdecomp/parallel.hpp"
#include "ssimdecomp/selection.hpp"
#include "ssimdecomp/solvers.hpp"

namespace ssimdecomp {

namespace {

using Status = TrialOutcome::Status;

TrialOutcome skipped(const Error& e) {
  TrialOutcome out;
  out.status = Status::skipped;
  out.skip_reason = std::string(to_string(e.code()));
  return out;
}

bool is_degenerate_trial(Errc code) {
  switch (code) {
    case Errc::ZeroVarianceTarget:
    case Errc::ZeroVarianceAtom:
    case Errc::NearSingular:
    case Errc::DegenerateCorrelation:
    case Errc::NotEnoughUsableAtoms:
    case Errc::TooManyConstantPatches:
      return true;
    default:
      return false;
  }
}

// Runs `body`, turning degenerate-input errors into a skipped outcome.
template <typename F>
TrialOutcome guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (!is_degenerate_trial(e.code())) throw;
    return skipped(e);
  }
}

// Accumulates the worst normalized residual and records the first breach.
class Tally {
 public:
  explicit Tally(double tol) : tol_(tol) {}

  void check(double residual, double scale, std::string_view what) {
    const double dev = scale > 0.0 ? std::abs(residual) / scale : std::abs(residual);
    worst_ = std::max(worst_, dev);
    if (!(dev <= tol_) && detail_.empty()) detail_ = fmt::format("{} deviates by {:.3e}", what, dev);
  }

  void fail(std::string what) {
    if (detail_.empty()) detail_ = std::move(what);
  }

  TrialOutcome outcome() const {
    TrialOutcome out;
    out.status = detail_.empty() ? Status::pass : Status::fail;
    out.deviation = worst_;
    out.detail = detail_;
    return out;
  }

 private:
  double tol_;
  double worst_ = 0.0;
  std::string detail_;
};

std::mt19937_64 trial_rng(const TrialConfig& cfg, std::size_t index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

std::size_t square_edge(std::size_t p) {
  auto l = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
  return l * l == p ? l : 0;
}

TrialInstance make_trial(const TrialConfig& cfg, std::size_t index, const GrayImage* image) {
  std::mt19937_64 rng = trial_rng(cfg, index);
  std::optional<Dictionary> dict;
  std::vector<double> target(cfg.p);

  if (cfg.distribution == Distribution::image_patches) {
    if (!image) throw Error(Errc::InvalidArgument, "image_patches needs a source image");
    const std::size_t l = square_edge(cfg.p);
    dict.emplace(build_random_patches(*image, l, cfg.n, rng()));
    std::uniform_int_distribution<std::size_t> px(0, image->width - l);
    std::uniform_int_distribution<std::size_t> py(0, image->height - l);
    const std::size_t x0 = px(rng);
    const std::size_t y0 = py(rng);
    for (std::size_t dy = 0; dy < l; ++dy) {
      for (std::size_t dx = 0; dx < l; ++dx) target[dy * l + dx] = image->at(x0 + dx, y0 + dy);
    }
  } else {
    auto draw = [&](std::vector<double>& v) {
      if (cfg.distribution == Distribution::gaussian01) {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (double& x : v) x = dist(rng);
      } else {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        for (double& x : v) x = dist(rng);
      }
    };
    std::vector<Block> atoms;
    atoms.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      std::vector<double> v(cfg.p);
      draw(v);
      atoms.emplace_back(std::move(v));
    }
    draw(target);
    dict.emplace(std::move(atoms), fmt::format("trial {} seed={}", index, cfg.seed));
  }

  std::vector<std::size_t> order(cfg.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(cfg.m);
  return {std::move(*dict), Block(std::move(target)), std::move(order)};
}

using TrialFn = TrialOutcome (*)(const TrialConfig&, const TrialInstance&);

CheckReport run_batch(const TrialConfig& cfg, std::string name, TrialFn fn) {
  cfg.validate();
  std::optional<GrayImage> image;
  if (cfg.distribution == Distribution::image_patches) image = read_pgm_file(cfg.image_path);

  std::vector<TrialOutcome> outcomes(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    try {
      const TrialInstance inst = make_trial(cfg, t, image ? &*image : nullptr);
      outcomes[t] = fn(cfg, inst);
    } catch (const Error& e) {
      if (!is_degenerate_trial(e.code())) throw;
      outcomes[t] = skipped(e);
    }
  });

  CheckReport report;
  report.name = std::move(name);
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const TrialOutcome& o = outcomes[t];
    switch (o.status) {
      case Status::pass: ++report.pass; break;
      case Status::fail:
        ++report.fail;
        report.failed_trials.push_back(t);
        if (report.first_failure.empty()) report.first_failure = fmt::format("trial {}: {}", t, o.detail);
        break;
      case Status::skipped:
        ++report.skipped;
        ++report.skip_reasons[o.skip_reason];
        break;
    }
    if (o.tie) ++report.ties;
    if (o.status != Status::skipped) report.worst_deviation = std::max(report.worst_deviation, o.deviation);
  }
  return report;
}

AssocReport single(const TrialConfig& cfg, std::string name, TrialFn fn) {
  const auto start = std::chrono::steady_clock::now();
  AssocReport report{cfg, {run_batch(cfg, std::move(name), fn)}, 0.0};
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrialOutcome selection_batch_fn(const TrialConfig& cfg, const TrialInstance& inst) {
  return selection_equivalence_trial(inst.dict, inst.target, cfg.m, cfg.tolerance);
}
TrialOutcome cost_batch_fn(const TrialConfig& cfg, const TrialInstance& inst) {
  return cost_equivalence_trial(inst.dict, inst.target, cfg.m, cfg.tolerance);
}
TrialOutcome ratio_batch_fn(const TrialConfig& cfg, const TrialInstance& inst) {
  return coefficient_ratio_trial(inst.dict, inst.target, inst.probe, cfg.tolerance);
}
TrialOutcome identities_batch_fn(const TrialConfig& cfg, const TrialInstance& inst) {
  return identities_trial(inst.dict, inst.target, inst.probe, cfg.tolerance);
}

void require_enumerable(const TrialConfig& cfg) {
  cfg.validate();
  if (binomial(cfg.n, cfg.m) > kMaxEnumeratedSubsets) {
    throw Error(Errc::CombinatorialBlowup, fmt::format("C({}, {}) subsets exceed the enumeration limit", cfg.n, cfg.m));
  }
}

}  // namespace

void TrialConfig::validate() const {
  if (p < 2) throw Error(Errc::InvalidArgument, "block length must be at least 2");
  if (m < 1 || m > n) throw Error(Errc::InvalidArgument, fmt::format("sparsity {} must be in [1, {}]", m, n));
  if (trials < 1) throw Error(Errc::InvalidArgument, "at least one trial is required");
  if (!(tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  if (distribution == Distribution::image_patches && square_edge(p) < 2) {
    throw Error(Errc::InvalidArgument, "image patches need a square block length");
  }
}

TrialInstance generate_trial(const TrialConfig& cfg, std::size_t index) {
  cfg.validate();
  std::optional<GrayImage> image;
  if (cfg.distribution == Distribution::image_patches) image = read_pgm_file(cfg.image_path);
  return make_trial(cfg, index, image ? &*image : nullptr);
}

TrialOutcome selection_equivalence_trial(const Dictionary& dict, const Block& y, std::size_t m, double tol) {
  return guarded([&] {
    const SelectionResult by_mse = exhaustive_select(dict, y, m, CostKind::MSE);
    const SelectionResult by_ssim = exhaustive_select(dict, y, m, CostKind::SSIM);
    TrialOutcome out;
    if (by_mse.subset == by_ssim.subset) return out;

    // Distinct optima are consistent only if each is optimal under the other cost.
    const double vy = stats(y).variance;
    const CostValue mse_of_ssim_pick = evaluate_cost(dict, by_ssim.subset, y, CostKind::MSE);
    const CostValue ssim_of_mse_pick = evaluate_cost(dict, by_mse.subset, y, CostKind::SSIM);
    const double mse_gap = std::abs(mse_of_ssim_pick.value - by_mse.final_cost.value) /
                           std::max({mse_of_ssim_pick.value, by_mse.final_cost.value, vy});
    const double ssim_gap = std::abs(ssim_of_mse_pick.value - by_ssim.final_cost.value);
    out.deviation = std::max(mse_gap, ssim_gap);
    if (costs_tie(mse_of_ssim_pick, by_mse.final_cost, tol, vy) &&
        costs_tie(ssim_of_mse_pick, by_ssim.final_cost, tol, 1.0)) {
      out.tie = true;
    } else {
      out.status = Status::fail;
      out.detail = "exhaustive MSE and SSIM optima select different subsets";
    }
    return out;
  });
}

TrialOutcome cost_equivalence_trial(const Dictionary& dict, const Block& y, std::size_t m, double tol) {
  return guarded([&] {
    const SelectionResult by_mse = exhaustive_select(dict, y, m, CostKind::MSE);
    const AtomSubset& best = by_mse.subset;
    const Decomposition d_mse = solve_mse(dict, best, y);
    const Decomposition d_ssim = solve_ssim(dict, best, y, Orientation::maximize);
    const double r_mse = std::abs(pcc(reconstruct(dict, d_mse), y));
    const double r_ssim = std::abs(pcc(reconstruct(dict, d_ssim), y));

    Tally tally(tol);
    tally.check(r_mse - r_ssim, 1.0, "|r_MSE| - |r_SSIM|");

    // The MSE optimum must also be optimal for |pcc| and |SSIM|.
    bool tie = false;
    for (CostKind kind : {CostKind::PCC, CostKind::SSIM}) {
      const SelectionResult other = exhaustive_select(dict, y, m, kind);
      const CostValue at_best = evaluate_cost(dict, best, y, kind);
      if (strictly_better(other.final_cost, at_best, tol, 1.0)) {
        tally.fail(fmt::format("{} optimum beats the MSE optimum", to_string(kind)));
      } else if (!(other.subset == best)) {
        tie = true;
      }
    }
    TrialOutcome out = tally.outcome();
    out.tie = tie && out.status == Status::pass;
    return out;
  });
}

TrialOutcome coefficient_ratio_trial(const Dictionary& dict, const Block& y, const std::vector<std::size_t>& subset,
                                     double tol) {
  return guarded([&] {
    const AtomSubset s(subset);
    const Decomposition d_mse = solve_mse(dict, s, y);
    const Decomposition d_max = solve_ssim(dict, s, y, Orientation::maximize);
    const Decomposition d_min = solve_ssim(dict, s, y, Orientation::minimize);
    const double r = pcc(reconstruct(dict, d_mse), y);

    auto largest = [](const std::vector<double>& v) {
      double mx = 0.0;
      for (double x : v) mx = std::max(mx, std::abs(x));
      return mx;
    };
    const double mse_floor = 1e-12 * largest(d_mse.coeffs);
    const double ssim_floor = 1e-12 * largest(d_max.coeffs);

    Tally tally(tol);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const bool mse_zero = std::abs(d_mse.coeffs[k]) <= mse_floor;
      const bool ssim_zero = std::abs(d_max.coeffs[k]) <= ssim_floor;
      if (mse_zero != ssim_zero) {
        tally.fail(fmt::format("coefficient {} is zero in only one scheme", k));
        continue;
      }
      if (ssim_zero) continue;
      tally.check(d_mse.coeffs[k] / d_max.coeffs[k] - r, std::abs(r), "s_MSE/s_SSIM - r");
      tally.check(d_mse.coeffs[k] / d_min.coeffs[k] + r, std::abs(r), "s_MSE/s_SSIM(min) + r");
    }
    return tally.outcome();
  });
}

TrialOutcome identities_trial(const Dictionary& dict, const Block& y, const std::vector<std::size_t>& subset,
                              double tol) {
  return guarded([&] {
    const AtomSubset s(subset);
    const BlockStats ys = stats(y);
    if (is_zero_variance(ys)) throw Error(Errc::ZeroVarianceTarget, "target block has zero variance");
    const double vy = ys.variance;
    const double sc = score(assemble(dict, s, y));

    Tally tally(tol);
    const Block x_mse = reconstruct(dict, solve_mse(dict, s, y));
    const double var_x = stats(x_mse).variance;
    const double cov_xy = covariance(x_mse, y);
    const double r2 = is_constant(x_mse) ? 0.0 : std::pow(pcc(x_mse, y), 2);
    tally.check(var_x - cov_xy, vy, "var(x_MSE) - cov(x_MSE, y)");
    tally.check(mse(x_mse, y) - vy * (1.0 - r2), vy, "mse - var(y)(1 - r^2)");

    // An uncorrelated subset has no SSIM solution; the MSE identities still hold.
    if (!(sc > 1e-12 * vy)) {
      TrialOutcome out = tally.outcome();
      if (out.status == Status::pass) {
        out.status = Status::skipped;
        out.skip_reason = std::string(to_string(Errc::DegenerateCorrelation));
      }
      return out;
    }
    const Block x_ssim = reconstruct(dict, solve_ssim(dict, s, y, Orientation::maximize));
    const double cov_ssim = covariance(x_ssim, y);
    tally.check(stats(x_ssim).variance - vy, vy, "var(x_SSIM) - var(y)");
    tally.check(cov_ssim * cov_ssim - vy * sc, vy * vy, "cov(x_SSIM, y)^2 - var(y) * score");
    return tally.outcome();
  });
}

bool AssocReport::ok() const noexcept {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.ok(); });
}

AssocReport check_selection_equivalence(const TrialConfig& cfg) {
  require_enumerable(cfg);
  return single(cfg, "selection", selection_batch_fn);
}

AssocReport check_cost_equivalence(const TrialConfig& cfg) {
  require_enumerable(cfg);
  return single(cfg, "cost", cost_batch_fn);
}

AssocReport check_coefficient_ratio(const TrialConfig& cfg) { return single(cfg, "ratio", ratio_batch_fn); }

AssocReport check_identities(const TrialConfig& cfg) { return single(cfg, "identities", identities_batch_fn); }

AssocReport run_checks(const TrialConfig& cfg, const std::vector<Check>& checks) {
  const auto start = std::chrono::steady_clock::now();
  AssocReport report{cfg, {}, 0.0};
  for (Check c : checks) {
    AssocReport part;
    switch (c) {
      case Check::selection: part = check_selection_equivalence(cfg); break;
      case Check::cost: part = check_cost_equivalence(cfg); break;
      case Check::ratio: part = check_coefficient_ratio(cfg); break;
      case Check::identities: part = check_identities(cfg); break;
    }
    report.checks.push_back(std::move(part.checks.front()));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string_view to_string(Check check) noexcept {
  switch (check) {
    case Check::selection: return "selection";
    case Check::cost: return "cost";
    case Check::ratio: return "ratio";
    case Check::identities: return "identities";
  }
  return "selection";
}

std::string format_report(const AssocReport& report) {
  const TrialConfig& cfg = report.config;
  std::string out;
  for (const CheckReport& c : report.checks) {
    out += fmt::format("{}: {}/{}/{} {:.3e}\n", c.name, c.pass, c.fail, c.skipped, c.worst_deviation);
  }
  const char* dist = cfg.distribution == Distribution::gaussian01  ? "gaussian"
                     : cfg.distribution == Distribution::uniform01 ? "uniform"
                                                                   : "image_patches";
  out += "\n";
  out += fmt::format("seed={}\np={}\nn={}\nm={}\ntrials={}\ndistribution={}\ntolerance={}\n", cfg.seed, cfg.p, cfg.n,
                     cfg.m, cfg.trials, dist, cfg.tolerance);
  for (const CheckReport& c : report.checks) {
    out += fmt::format("{0}.pass={1}\n{0}.fail={2}\n{0}.skipped={3}\n{0}.ties={4}\n{0}.worst={5:.17g}\n", c.name,
                       c.pass, c.fail, c.skipped, c.ties, c.worst_deviation);
    for (const auto& [reason, count] : c.skip_reasons) out += fmt::format("{}.skipped.{}={}\n", c.name, reason, count);
    if (!c.first_failure.empty()) out += fmt::format("{}.first_failure={}\n", c.name, c.first_failure);
  }
  out += fmt::format("duration_s={:.3f}\nstatus={}\n", report.seconds, report.ok() ? "pass" : "fail");
  return out;
}

}  // namespace ssimdecomp
