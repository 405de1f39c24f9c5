#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcat/profile.hpp"

namespace hcat {

enum class Verdict { Unbounded, Bounded, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::Bounded: return "Bounded";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

struct ClassifyThresholds {
  double c0_min = 1e-4;
  double stability_max = 0.01;  // relative spread of u over the last two decades
  double tail_tol_rel = 1e-3;   // multiplied by r0
  double min_reach = 1e4;       // branch must reach this many necksizes
};

struct EndClassification {
  Branch branch = Branch::Upper;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> c0;
  std::vector<std::pair<double, double>> checkpoints;  // (x, u = x |f'(x)|)
  double stability = 0.0;
  double height_tail = 0.0;
  double tail_estimate = 0.0;  // extrapolated height gain beyond the last radius
  bool monotone = true;        // u nonincreasing within 1e-12 slack
  std::optional<double> first_increase;  // radius where monotonicity first failed
  double tail_tol = 0.0;
  ClassifyThresholds thresholds;
};

/// Verdict on the behavior at infinity of one end from u(x) = x |f'(x)| at the
/// checkpoint ladder. Throws std::invalid_argument when the branch is shorter
/// than thresholds.min_reach necksizes.
EndClassification classify_end(const Catenoid& c, Branch b, const ClassifyThresholds& th = {});

struct LogFit {
  double slope = 0.0;      // held at c0
  double intercept = 0.0;  // f(x) ~ sign * (c0 log(x/r0) + intercept)
  double x_lo = 0.0, x_hi = 0.0;
};

struct GrowthFit {
  Branch branch = Branch::Upper;
  double c0 = 0.0;
  std::vector<std::pair<double, double>> remainder;  // (x, u(x) - c0) below the averaging window
  LogFit log_fit;
  double fit_residual = 0.0;
};

/// c0 as the mean of u over the final decade; heights fitted against
/// c0 log(x/r0) + const over `window` (default: the final decade).
/// Throws std::logic_error unless the end classifies Unbounded.
GrowthFit estimate_c0(const Catenoid& c, Branch b, std::optional<std::pair<double, double>> window = std::nullopt,
                      const ClassifyThresholds& th = {});

struct MarginSeries {
  std::vector<std::pair<double, double>> margins;  // (x, r0/sqrt(x^2-r0^2) - f'(x))
  double min_margin = 0.0;
  double min_relative_margin = 0.0;  // margin / bound
  bool all_positive = false;
};

/// Upper-branch margins against the minimal catenoid slope bound.
MarginSeries verify_claim1_bound(const Catenoid& c);

struct TailIntegral {
  double p = 0.0;
  double lower_limit = 0.0;  // 1.001 r0
  double upper_limit = 0.0;  // last integrated radius
  double integral = 0.0;     // over [lower_limit, upper_limit]
  double tail = 0.0;         // power-law extrapolation beyond upper_limit (inf if divergent)
  double decay_exponent = 0.0;  // m in |f'| ~ A x^-m over the last decade
  bool convergent = false;
};

/// Integral of |f'|^p along the branch plus extrapolated tail. convergent
/// requires p > 1 and a tail below tail_tol_rel * r0. Throws for p <= 0.
TailIntegral tail_integral(const Catenoid& c, Branch b, double p, const ClassifyThresholds& th = {});

struct SandwichRow {
  double x = 0.0;
  double q = 0.0;         // normalized x f'/sqrt(1+f'^2)
  double integral = 0.0;  // int_{x1}^x f'^(2a-1)
  double lower = 0.0, upper = 0.0;                      // exp(-I), exp(-I/2)
  double corrected_lower = 0.0, corrected_upper = 1.0;  // exp(-2I), 1
};

struct SandwichReport {
  double alpha = 0.0;
  double x_normalization = 0.0;
  std::vector<SandwichRow> rows;
  double slack = 1e-6;
  bool lower_ok = false, upper_ok = false;
  bool corrected_ok = false;
  std::optional<double> first_upper_violation;
  std::optional<double> first_lower_violation;
};

/// Sandwich bounds on x f'/sqrt(1+f'^2) for the upper end of a power-law
/// catenoid, normalized at the first checkpoint. Reports both the printed
/// bounds exp(-I) <= Q <= exp(-I/2) and exp(-2I) <= Q <= 1, which follows
/// from d/dx log Q = -2 f'^(2a-1) (1+f'^2)^(1/2-a).
SandwichReport verify_sandwich(const Catenoid& c, double alpha, double slack = 1e-6);

}  // namespace hcat
