#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace gvm {

// Standard normal density.
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Standard normal cdf via erfc; accurate to ~1e-15 across the real line,
// including the deep left tail where 0.5*(1+erf) would cancel.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Pairwise (cascade) summation: deterministic for a fixed operand order and
// far smaller rounding error than a running sum on long inputs.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace gvm
