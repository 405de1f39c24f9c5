#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcat/asymptotics.hpp"
#include "hcat/prescribed.hpp"
#include "hcat/profile.hpp"

namespace hcat {

/// A check was asked of inputs that do not meet its hypotheses.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ComparisonRow {
  double x = 0.0;
  double h_upper = 0.0, f_upper = 0.0;
  double h_upper_slope = 0.0, f_upper_slope = 0.0;
  double h_lower = 0.0, f_lower = 0.0;
  double h_lower_slope = 0.0, f_lower_slope = 0.0;
};

struct Violation {
  double x = 0.0;
  std::string inequality;
  double magnitude = 0.0;  // how far the inequality is from holding (>= 0)
  bool indistinguishable = false;
};

struct ComparisonReport {
  std::string h_spec, f_spec;
  double r0 = 0.0;
  std::vector<double> grid;
  std::vector<ComparisonRow> rows;
  double hypothesis_margin = 0.0;  // min of H - F on the y-grid
  double hypothesis_argmin = 0.0;
  bool height_ok = true;
  bool derivative_ok = true;
  bool derivatives_checked = false;
  std::optional<double> x0;
  /// Lower-end derivative ordering: h-' < f-' for x > x0 when it holds at x0.
  bool lower_derivative_ok = true;
  /// The lower-end conclusion read with upper-end symbols: h+' < f+' for x > x0.
  bool literal_lower_reading_ok = true;
  std::optional<Violation> first_violation;
  int indistinguishable = 0;  // violations below 10x the integrator tolerance
};

/// Radii 1.001 r0 * 10^(k/per_decade) up to x_hi.
std::vector<double> comparison_grid(double r0, double x_hi, int per_decade = 64);

/// Integrates Sigma_H(r0) and Sigma_F(r0) and checks h+ > f+ and h- < f- on
/// the grid (default: comparison_grid up to the common integrated range).
/// Throws PreconditionError unless H > F on a grid of (-1, 1).
ComparisonReport compare_heights(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                 std::optional<std::vector<double>> grid = std::nullopt,
                                 const IntegratorConfig& cfg = {});

/// Checks that h+' > f+' persists beyond x0 (default: first grid radius), and
/// the mirrored lower-end ordering h-' < f-'. Height rows are filled too.
ComparisonReport compare_derivatives(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                     std::optional<double> x0 = std::nullopt,
                                     std::optional<std::vector<double>> grid = std::nullopt,
                                     const IntegratorConfig& cfg = {});

void write_comparison_csv(std::ostream& os, const ComparisonReport& r);

struct NecksizeRow {
  double r0 = 0.0;
  EndClassification upper, lower;
};

struct NecksizeReport {
  std::string h_spec;
  std::vector<NecksizeRow> rows;
  bool upper_agree = true, lower_agree = true;
  bool pass = true;
};

/// Classifies Sigma_H(r) for every r (in parallel); passes when the decisive
/// verdicts agree per end.
NecksizeReport behavior_across_necksizes(const PrescribedFunction& h, const std::vector<double>& r_list,
                                         const IntegratorConfig& cfg = {});

struct TransferEnd {
  Endpoint endpoint = Endpoint::Plus;
  EquivalenceReport ratio;
  EndClassification h_end, f_end;
  bool agree = false;
  bool inconclusive = false;  // some verdict was Inconclusive; excluded from the pass decision
};

struct TransferReport {
  std::string h_spec, f_spec;
  double r0 = 0.0;
  std::vector<TransferEnd> ends;
  bool pass = false;
};

/// For each requested endpoint (+1: upper end, -1: lower end), requires a
/// converged limit_ratio(H, F) and compares the verdicts of the matching ends.
TransferReport equivalence_behavior(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                    const std::vector<Endpoint>& endpoints = {Endpoint::Plus, Endpoint::Minus},
                                    const IntegratorConfig& cfg = {});

struct CoverRow {
  double r0 = 0.0;
  double sup_upper = 0.0, sup_lower = 0.0, sup = 0.0;
  double argmax = 0.0;
};

struct CoverReport {
  double x_lo = 0.0, x_hi = 0.0;
  double cover_tol = 0.0;  // 0.05 * x_hi
  std::vector<CoverRow> rows;
  bool strictly_decreasing = false;
  bool final_below_tol = false;
  bool pass = false;
};

/// Sup of |height| over the window on both ends for each r of a decreasing
/// sequence. Throws std::invalid_argument if the window meets a waist disk.
CoverReport double_cover_convergence(const PrescribedFunction& h, const std::vector<double>& r_sequence, double x_lo,
                                     double x_hi, const IntegratorConfig& cfg = {});

}  // namespace hcat
