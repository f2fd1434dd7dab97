#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

/// Composite Simpson rule with `panels` (even) sub-intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels = 20000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// P(x <= t) of N(mean, sigma) truncated to [lo, hi], by quadrature of the
/// un-normalized Gaussian kernel.
inline double truncated_gaussian_cdf(double mean, double sigma, double lo, double hi, double t) {
  auto kernel = [&](double x) { return std::exp(-0.5 * (x - mean) * (x - mean) / (sigma * sigma)); };
  return simpson(kernel, lo, t) / simpson(kernel, lo, hi);
}

/// Bertrand probabilities by deterministic midpoint-rule integration of the
/// geometry (no sampling).
inline double bertrand_endpoints_longer(std::size_t grid = 1'000'000) {
  // Angle difference uniform on [0, 2pi); chord = 2|sin(delta/2)|.
  std::size_t hits = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double delta = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    if (2.0 * std::abs(std::sin(delta / 2.0)) > std::sqrt(3.0)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(grid);
}

inline double bertrand_radial_longer(std::size_t grid = 1'000'000) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double d = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    if (2.0 * std::sqrt(1.0 - d * d) > std::sqrt(3.0)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(grid);
}

inline double bertrand_disk_longer(std::size_t grid = 2000) {
  std::size_t inside = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double x = -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      const double y = -1.0 + 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
      const double r2 = x * x + y * y;
      if (r2 >= 1.0) continue;
      ++inside;
      if (2.0 * std::sqrt(1.0 - r2) > std::sqrt(3.0)) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(inside);
}

/// Pearson chi-square statistic of an r x c contingency table.
inline double chi_square_independence(const std::vector<std::vector<double>>& table) {
  const std::size_t r = table.size();
  const std::size_t c = table[0].size();
  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      total += table[i][j];
    }
  double stat = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double e = rows[i] * cols[j] / total;
      stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  return stat;
}

inline double chi_square_critical(double dof, double alpha) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

}  // namespace oracle
