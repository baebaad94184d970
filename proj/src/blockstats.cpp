#include "ssimdecomp/blockstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssimdecomp/error.hpp"

namespace ssimdecomp {

namespace {

void require_same_length(const Block& a, const Block& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch, "block lengths " + std::to_string(a.size()) + " and " +
                                             std::to_string(b.size()) + " differ");
  }
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

Block::Block(std::vector<double> samples) : data_(std::move(samples)) {
  if (data_.size() < 2) {
    throw Error(Errc::InvalidBlock, "a block needs at least 2 samples, got " + std::to_string(data_.size()));
  }
  for (double x : data_) {
    if (!std::isfinite(x)) throw Error(Errc::InvalidBlock, "block sample is not finite");
  }
}

BlockStats stats(const Block& b) {
  BlockStats s;
  s.mean = mean_of(b.samples());
  for (double x : b.samples()) {
    const double d = x - s.mean;
    s.scatter += d * d;
  }
  s.variance = s.scatter / static_cast<double>(b.size());
  return s;
}

bool is_zero_variance(const BlockStats& s) noexcept {
  return s.variance < 1e-12 * std::max(1.0, s.mean * s.mean);
}

bool is_constant(const Block& b) { return is_zero_variance(stats(b)); }

double covariance(const Block& a, const Block& b) {
  require_same_length(a, b);
  const double ma = mean_of(a.samples());
  const double mb = mean_of(b.samples());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - ma) * (b[i] - mb);
  return sum / static_cast<double>(a.size());
}

double pcc(const Block& a, const Block& b) {
  require_same_length(a, b);
  const BlockStats sa = stats(a);
  const BlockStats sb = stats(b);
  if (is_zero_variance(sa) || is_zero_variance(sb)) {
    throw Error(Errc::ZeroVariance, "correlation coefficient is undefined for a constant block");
  }
  return covariance(a, b) / std::sqrt(sa.variance * sb.variance);
}

double mse(const Block& a, const Block& b) {
  require_same_length(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double psnr(const Block& a, const Block& b, double peak) {
  if (!(peak > 0.0)) throw Error(Errc::InvalidArgument, "psnr peak must be positive");
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / e);
}

double ssim_eps(const Block& a, const Block& b, double e1, double e2) {
  require_same_length(a, b);
  if (!(e1 > 0.0) || !(e2 > 0.0)) throw Error(Errc::InvalidArgument, "ssim constants must be positive");
  const BlockStats sa = stats(a);
  const BlockStats sb = stats(b);
  const double cab = covariance(a, b);
  const double luminance = (2.0 * sa.mean * sb.mean + e1) / (sa.mean * sa.mean + sb.mean * sb.mean + e1);
  const double structure = (2.0 * cab + e2) / (sa.variance + sb.variance + e2);
  return luminance * structure;
}

double ssim(const Block& a, const Block& b) {
  require_same_length(a, b);
  const BlockStats sa = stats(a);
  const BlockStats sb = stats(b);
  if (is_zero_variance(sa) && is_zero_variance(sb)) {
    throw Error(Errc::DegenerateInput, "ssim with zero constants needs a non-constant block");
  }
  const double mean_sq = sa.mean * sa.mean + sb.mean * sb.mean;
  if (mean_sq == 0.0) throw Error(Errc::DegenerateInput, "ssim with zero constants needs a non-zero mean");
  const double cab = covariance(a, b);
  return 4.0 * sa.mean * sb.mean * cab / (mean_sq * (sa.variance + sb.variance));
}

double ssim_reduced(const Block& a, const Block& b) {
  require_same_length(a, b);
  const BlockStats sa = stats(a);
  const BlockStats sb = stats(b);
  if (is_zero_variance(sa) && is_zero_variance(sb)) {
    throw Error(Errc::DegenerateInput, "reduced ssim needs a non-constant block");
  }
  return 2.0 * covariance(a, b) / (sa.variance + sb.variance);
}

}  // namespace ssimdecomp
