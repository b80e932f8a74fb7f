#pragma once

// Uniform node grid x_k = k h on [0, L] and the discrete norms used throughout.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nspbl/errors.hpp"

namespace nspbl {

struct Grid {
  double length = 400.0;
  int cells = 4000;

  double h() const { return length / cells; }
  std::size_t size() const { return static_cast<std::size_t>(cells) + 1; }
  double x(std::size_t k) const { return static_cast<double>(k) * h(); }

  void validate() const {
    if (!(length > 0.0)) throw PreconditionViolation("grid: length L must be > 0");
    if (cells < 16) throw PreconditionViolation("grid: cell count N must be >= 16");
  }
};

/// Composite trapezoid rule on a uniform grid.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * h;
}

/// Forward differences at interior nodes, backward difference at the last node.
inline std::vector<double> forward_difference(std::span<const double> f, double h) {
  std::vector<double> d(f.size(), 0.0);
  if (f.size() < 2) return d;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) d[k] = (f[k + 1] - f[k]) / h;
  d.back() = (f[f.size() - 1] - f[f.size() - 2]) / h;
  return d;
}

/// Second-order central differences, one-sided second order at the ends.
inline std::vector<double> central_difference(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return forward_difference(f, h);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

inline std::vector<double> second_difference(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
  if (n >= 3) {
    d[0] = d[1];
    d[n - 1] = d[n - 2];
  }
  return d;
}

inline double l2_norm_squared(std::span<const double> f, double h) {
  std::vector<double> sq(f.size());
  std::transform(f.begin(), f.end(), sq.begin(), [](double v) { return v * v; });
  return trapezoid(sq, h);
}

inline double l2_norm(std::span<const double> f, double h) { return std::sqrt(l2_norm_squared(f, h)); }

inline double sup_norm(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

inline double h1_norm_squared(std::span<const double> f, double h) {
  const std::vector<double> d = forward_difference(f, h);
  return l2_norm_squared(f, h) + l2_norm_squared(d, h);
}

inline double h1_norm(std::span<const double> f, double h) { return std::sqrt(h1_norm_squared(f, h)); }

}  // namespace nspbl
