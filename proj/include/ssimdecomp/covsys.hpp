#pragma once

#include <cstddef>
#include <vector>

#include "ssimdecomp/blockstats.hpp"
#include "ssimdecomp/dictionary.hpp"

namespace ssimdecomp {

/// Ordered list of distinct atom indices (m >= 1). Range against a particular
/// dictionary is checked by `validate_for`.
class AtomSubset {
 public:
  explicit AtomSubset(std::vector<std::size_t> indices);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t k) const noexcept { return indices_[k]; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  /// Throws Errc::IndexOutOfRange if any index is >= n.
  void validate_for(std::size_t n) const;

  /// Same indices in ascending order.
  AtomSubset sorted() const;

  friend bool operator==(const AtomSubset&, const AtomSubset&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// The covariance system shared by the closed-form schemes:
///   sigma    m x m covariances among the selected atoms (row-major)
///   sigma_y  covariances between each selected atom and the target
///   sigma_y2 variance of the target
class CovSystem {
 public:
  /// Validates shape, symmetry (1e-12 relative) and a positive diagonal.
  CovSystem(std::size_t m, std::vector<double> sigma, std::vector<double> sigma_y, double sigma_y2);

  std::size_t order() const noexcept { return m_; }
  double sigma(std::size_t i, std::size_t j) const noexcept { return sigma_[i * m_ + j]; }
  const std::vector<double>& sigma_matrix() const noexcept { return sigma_; }
  const std::vector<double>& sigma_y() const noexcept { return sigma_y_; }
  double sigma_y2() const noexcept { return sigma_y2_; }
  double trace() const noexcept;

 private:
  std::size_t m_;
  std::vector<double> sigma_;
  std::vector<double> sigma_y_;
  double sigma_y2_;
};

CovSystem assemble(const Dictionary& dict, const AtomSubset& subset, const Block& y);

/// Relative pivot threshold: a Cholesky pivot below kPivotTolerance * trace/m
/// is reported as Errc::NearSingular.
inline constexpr double kPivotTolerance = 1e-10;

/// Weights w with sigma * w = sigma_y (the MSE coefficients).
std::vector<double> solve_weights(const CovSystem& sys);

/// The projection score sigma_y^T sigma^-1 sigma_y, evaluated as the squared
/// norm of L^-1 sigma_y so it is non-negative by construction.
double score(const CovSystem& sys);

struct SolvedSystem {
  std::vector<double> weights;
  double score = 0.0;
};

/// One factorization, both results.
SolvedSystem solve_system(const CovSystem& sys);

}  // namespace ssimdecomp
