#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hcat {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
  bool ok = false;
};

/// Ordinary least squares v ~ intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> v) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2 || v.size() != n) return f;
  double mx = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    mv += v[i];
  }
  mx /= n;
  mv /= n;
  double sxx = 0, sxv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxv += (x[i] - mx) * (v[i] - mv);
  }
  if (!(sxx > 0.0)) return f;
  f.slope = sxv / sxx;
  f.intercept = mv - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.max_residual = std::max(f.max_residual, std::abs(v[i] - (f.intercept + f.slope * x[i])));
  f.ok = std::isfinite(f.slope) && std::isfinite(f.intercept);
  return f;
}

/// Geometric ladder lo, lo*q, lo*q^2, ... (q = 10^(1/per_decade)) up to hi,
/// with hi appended when the last ladder point falls short of it.
inline std::vector<double> log_ladder(double lo, double hi, int per_decade) {
  std::vector<double> out;
  if (!(hi >= lo) || per_decade <= 0) return out;
  const double step = std::log(10.0) / per_decade;
  for (int k = 0;; ++k) {
    const double x = lo * std::exp(step * k);
    if (x > hi * (1.0 + 1e-12)) break;
    out.push_back(std::min(x, hi));
  }
  if (out.back() < hi * (1.0 - 1e-9)) out.push_back(hi);
  return out;
}

/// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) acc += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
  return acc * half;
}

}  // namespace hcat
