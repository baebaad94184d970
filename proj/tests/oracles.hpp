#pragma once

// Test-only reference routines. Nothing here calls into the library's
// numerical paths, so they can serve as independent oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double cov(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size());
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
inline std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) throw std::runtime_error("singular");
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

/// Central difference of f at params[k] with step h = 1e-6 * (1 + |params[k]|).
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> params, std::size_t k) {
  const double h = 1e-6 * (1.0 + std::abs(params[k]));
  const double base = params[k];
  params[k] = base + h;
  const double up = f(params);
  params[k] = base - h;
  const double down = f(params);
  return (up - down) / (2.0 * h);
}

/// x = sum_k s_k atoms[k] + o, with params = (s_1..s_m, o).
inline std::vector<double> combine(const std::vector<std::vector<double>>& atoms, const std::vector<double>& params) {
  std::vector<double> x(atoms.front().size(), params.back());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += params[k] * atoms[k][i];
  }
  return x;
}

inline std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t p) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(p);
  for (double& x : v) x = d(rng);
  return v;
}

/// Centres each vector and orthogonalizes them by modified Gram-Schmidt, so
/// the results have zero mean and zero pairwise covariance.
inline std::vector<std::vector<double>> centered_orthogonal(std::vector<std::vector<double>> vs) {
  for (auto& v : vs) {
    const double m = mean(v);
    for (double& x : v) x -= m;
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      double nn = 0.0;
      for (std::size_t t = 0; t < vs[i].size(); ++t) {
        dot += vs[i][t] * vs[j][t];
        nn += vs[j][t] * vs[j][t];
      }
      for (std::size_t t = 0; t < vs[i].size(); ++t) vs[i][t] -= dot / nn * vs[j][t];
    }
  }
  return vs;
}

}  // namespace oracle
