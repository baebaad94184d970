#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssimdecomp {

/// A fixed-length run of real pixel samples (an l x l image block flattened
/// row-major, or any vector being decomposed). Holds at least two finite
/// samples; construction throws Errc::InvalidBlock otherwise.
class Block {
 public:
  explicit Block(std::vector<double> samples);

  std::size_t size() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  std::span<const double> samples() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Block&, const Block&) = default;

 private:
  std::vector<double> data_;
};

/// Mean, population variance and scatter (sum of squared deviations).
struct BlockStats {
  double mean = 0.0;
  double variance = 0.0;
  double scatter = 0.0;
};

BlockStats stats(const Block& b);

/// Variances below 1e-12 * max(1, mean^2) are treated as zero.
bool is_zero_variance(const BlockStats& s) noexcept;
bool is_constant(const Block& b);

double covariance(const Block& a, const Block& b);
double pcc(const Block& a, const Block& b);
double mse(const Block& a, const Block& b);

/// Peak signal-to-noise ratio in dB. Identical blocks yield +infinity.
double psnr(const Block& a, const Block& b, double peak);

/// SSIM with stabilising constants e1, e2 > 0, using the cross covariance in
/// the contrast-structure factor.
double ssim_eps(const Block& a, const Block& b, double e1, double e2);

/// SSIM with e1 = e2 = 0:  4 mu_a mu_b s_ab / ((mu_a^2 + mu_b^2)(s_a^2 + s_b^2)).
/// Throws Errc::DegenerateInput when either denominator factor vanishes.
double ssim(const Block& a, const Block& b);

/// 2 s_ab / (s_a^2 + s_b^2), the form SSIM takes once the means agree.
double ssim_reduced(const Block& a, const Block& b);

/// Default stabilising constants for 8-bit data: (0.01*255)^2, (0.03*255)^2.
inline constexpr double kDefaultSsimEps1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kDefaultSsimEps2 = (0.03 * 255.0) * (0.03 * 255.0);

}  // namespace ssimdecomp
