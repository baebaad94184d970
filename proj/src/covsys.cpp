#include "ssimdecomp/covsys.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssimdecomp/error.hpp"

namespace ssimdecomp {

namespace {

// Lower-triangular Cholesky factor of a small dense SPD matrix.
class Cholesky {
 public:
  explicit Cholesky(const CovSystem& sys) : m_(sys.order()), l_(m_ * m_, 0.0) {
    const double threshold = kPivotTolerance * sys.trace() / static_cast<double>(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      double pivot = sys.sigma(j, j);
      for (std::size_t k = 0; k < j; ++k) pivot -= l_[j * m_ + k] * l_[j * m_ + k];
      if (!(pivot >= threshold) || pivot <= 0.0) {
        throw Error(Errc::NearSingular, "covariance pivot " + std::to_string(pivot) + " at column " +
                                            std::to_string(j) + " is below " + std::to_string(threshold));
      }
      const double d = std::sqrt(pivot);
      l_[j * m_ + j] = d;
      for (std::size_t i = j + 1; i < m_; ++i) {
        double v = sys.sigma(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l_[i * m_ + k] * l_[j * m_ + k];
        l_[i * m_ + j] = v / d;
      }
    }
  }

  // Solves L z = b.
  std::vector<double> forward(const std::vector<double>& b) const {
    std::vector<double> z(b);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < i; ++k) z[i] -= l_[i * m_ + k] * z[k];
      z[i] /= l_[i * m_ + i];
    }
    return z;
  }

  // Solves L^T w = z.
  std::vector<double> backward(std::vector<double> z) const {
    for (std::size_t i = m_; i-- > 0;) {
      for (std::size_t k = i + 1; k < m_; ++k) z[i] -= l_[k * m_ + i] * z[k];
      z[i] /= l_[i * m_ + i];
    }
    return z;
  }

 private:
  std::size_t m_;
  std::vector<double> l_;
};

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

AtomSubset::AtomSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw Error(Errc::InvalidArgument, "an atom subset needs at least one index");
  std::vector<std::size_t> copy = indices_;
  std::sort(copy.begin(), copy.end());
  if (std::adjacent_find(copy.begin(), copy.end()) != copy.end()) {
    throw Error(Errc::InvalidArgument, "atom subset contains a duplicate index");
  }
}

void AtomSubset::validate_for(std::size_t n) const {
  for (std::size_t i : indices_) {
    if (i >= n) {
      throw Error(Errc::IndexOutOfRange,
                  "atom index " + std::to_string(i) + " out of range for " + std::to_string(n) + " atoms");
    }
  }
}

AtomSubset AtomSubset::sorted() const {
  std::vector<std::size_t> copy = indices_;
  std::sort(copy.begin(), copy.end());
  return AtomSubset(std::move(copy));
}

CovSystem::CovSystem(std::size_t m, std::vector<double> cov, std::vector<double> cross_cov, double target_var)
    : m_(m), sigma_(std::move(cov)), sigma_y_(std::move(cross_cov)), sigma_y2_(target_var) {
  if (m_ == 0 || sigma_.size() != m_ * m_ || sigma_y_.size() != m_) {
    throw Error(Errc::DimensionMismatch, "covariance system shape is inconsistent");
  }
  if (!(sigma_y2_ >= 0.0)) throw Error(Errc::InvalidArgument, "target variance must be non-negative");
  for (std::size_t i = 0; i < m_; ++i) {
    if (!(sigma(i, i) > 0.0)) {
      throw Error(Errc::ZeroVarianceAtom, "covariance diagonal entry " + std::to_string(i) + " is not positive");
    }
    for (std::size_t j = i + 1; j < m_; ++j) {
      const double a = sigma(i, j);
      const double b = sigma(j, i);
      if (std::abs(a - b) > 1e-12 * std::max({std::abs(a), std::abs(b), std::sqrt(sigma(i, i) * sigma(j, j))})) {
        throw Error(Errc::InvalidArgument, "covariance matrix is not symmetric");
      }
    }
  }
}

double CovSystem::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < m_; ++i) t += sigma(i, i);
  return t;
}

CovSystem assemble(const Dictionary& dict, const AtomSubset& subset, const Block& y) {
  subset.validate_for(dict.size());
  if (y.size() != dict.atom_length()) {
    throw Error(Errc::DimensionMismatch, "target length " + std::to_string(y.size()) +
                                             " does not match atom length " + std::to_string(dict.atom_length()));
  }
  const std::size_t m = subset.size();
  std::vector<double> sigma(m * m);
  std::vector<double> sigma_y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Block& ai = dict.atom(subset[i]);
    sigma[i * m + i] = covariance(ai, ai);
    if (!(sigma[i * m + i] > 0.0)) {
      throw Error(Errc::ZeroVarianceAtom, "atom " + std::to_string(subset[i]) + " has zero variance");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double c = covariance(ai, dict.atom(subset[j]));
      sigma[i * m + j] = c;
      sigma[j * m + i] = c;
    }
    sigma_y[i] = covariance(ai, y);
  }
  return CovSystem(m, std::move(sigma), std::move(sigma_y), stats(y).variance);
}

SolvedSystem solve_system(const CovSystem& sys) {
  const Cholesky chol(sys);
  std::vector<double> z = chol.forward(sys.sigma_y());
  SolvedSystem out;
  out.score = squared_norm(z);
  out.weights = chol.backward(std::move(z));
  return out;
}

std::vector<double> solve_weights(const CovSystem& sys) { return solve_system(sys).weights; }

double score(const CovSystem& sys) {
  const Cholesky chol(sys);
  return squared_norm(chol.forward(sys.sigma_y()));
}

}  // namespace ssimdecomp
