#include "hcat/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "hcat/numeric.hpp"

namespace hcat {

namespace {

// Strict ordering H > F on interior Chebyshev nodes of (-1, 1).
std::pair<double, double> ordering_margin(const PrescribedFunction& h, const PrescribedFunction& f) {
  constexpr int n = 4001;
  double best = std::numeric_limits<double>::infinity(), at = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = std::cos(std::acos(-1.0) * (k + 0.5) / n);
    const double d = h(y) - f(y);
    if (d < best) {
      best = d;
      at = y;
    }
  }
  return {best, at};
}

struct Pair {
  Catenoid h, f;
};

Pair integrate_pair(const PrescribedFunction& h, const PrescribedFunction& f, double r0, const IntegratorConfig& cfg) {
  auto fh = std::async(std::launch::async, [&] { return integrate_catenoid(h, r0, cfg); });
  Catenoid cf = integrate_catenoid(f, r0, cfg);
  return {fh.get(), std::move(cf)};
}

double common_reach(const Pair& p) {
  return std::min({p.h.max_radius(Branch::Upper), p.h.max_radius(Branch::Lower), p.f.max_radius(Branch::Upper),
                   p.f.max_radius(Branch::Lower)});
}

ComparisonReport prepare(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                         std::optional<std::vector<double>> grid, const IntegratorConfig& cfg, std::optional<Pair>& out) {
  ComparisonReport rep;
  rep.h_spec = h.describe();
  rep.f_spec = f.describe();
  rep.r0 = r0;
  const auto [margin, at] = ordering_margin(h, f);
  rep.hypothesis_margin = margin;
  rep.hypothesis_argmin = at;
  if (!(margin > 0.0))
    throw PreconditionError("H > F fails at y=" + format_double(at) + " (H - F = " + format_double(margin) + ")");
  out = integrate_pair(h, f, r0, cfg);
  const Pair& pair = *out;
  const double reach = common_reach(pair);
  if (!(reach > 1.001 * r0)) throw PreconditionError("catenoids do not extend past the waist");
  rep.grid = grid ? *grid : comparison_grid(r0, reach);
  for (double x : rep.grid) {
    if (!(x > r0) || x > reach) throw std::invalid_argument("comparison grid radius " + format_double(x) + " out of range");
    ComparisonRow row;
    row.x = x;
    const auto hu = pair.h.point_at(Branch::Upper, x), fu = pair.f.point_at(Branch::Upper, x);
    const auto hl = pair.h.point_at(Branch::Lower, x), fl = pair.f.point_at(Branch::Lower, x);
    row.h_upper = hu.state.z;
    row.f_upper = fu.state.z;
    row.h_upper_slope = hu.slope;
    row.f_upper_slope = fu.slope;
    row.h_lower = hl.state.z;
    row.f_lower = fl.state.z;
    row.h_lower_slope = hl.slope;
    row.f_lower_slope = fl.slope;
    rep.rows.push_back(row);
  }
  return rep;
}

// Records that `lhs > rhs` failed; violations within 10x the integrator
// tolerance are counted but do not fail the report.
bool record(ComparisonReport& rep, const IntegratorConfig& cfg, double x, const char* name, double lhs, double rhs) {
  if (lhs > rhs) return true;
  Violation v;
  v.x = x;
  v.inequality = name;
  v.magnitude = rhs - lhs;
  v.indistinguishable = v.magnitude < 10.0 * (cfg.rel_tol * std::max(std::abs(lhs), std::abs(rhs)) + cfg.abs_tol);
  if (v.indistinguishable) ++rep.indistinguishable;
  if (!rep.first_violation) rep.first_violation = v;
  return v.indistinguishable;
}

void check_heights(ComparisonReport& rep, const IntegratorConfig& cfg) {
  for (const auto& r : rep.rows) {
    if (!record(rep, cfg, r.x, "h+ > f+", r.h_upper, r.f_upper)) rep.height_ok = false;
    if (!record(rep, cfg, r.x, "h- < f-", r.f_lower, r.h_lower)) rep.height_ok = false;
  }
}

}  // namespace

std::vector<double> comparison_grid(double r0, double x_hi, int per_decade) {
  return log_ladder(1.001 * r0, x_hi, per_decade);
}

ComparisonReport compare_heights(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                 std::optional<std::vector<double>> grid, const IntegratorConfig& cfg) {
  std::optional<Pair> pair;
  auto rep = prepare(h, f, r0, std::move(grid), cfg, pair);
  check_heights(rep, cfg);
  return rep;
}

ComparisonReport compare_derivatives(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                     std::optional<double> x0, std::optional<std::vector<double>> grid,
                                     const IntegratorConfig& cfg) {
  std::optional<Pair> stored;
  auto rep = prepare(h, f, r0, std::move(grid), cfg, stored);
  const Pair& pair = *stored;
  check_heights(rep, cfg);
  rep.derivatives_checked = true;
  const double start = x0 ? *x0 : rep.grid.front();
  rep.x0 = start;
  if (!(start > r0) || start > common_reach(pair)) throw std::invalid_argument("x0 outside the integrated range");
  const double hu0 = pair.h.point_at(Branch::Upper, start).slope, fu0 = pair.f.point_at(Branch::Upper, start).slope;
  if (!(hu0 > fu0))
    throw PreconditionError("h+'(x0) > f+'(x0) not observed at x0=" + format_double(start));
  const double hl0 = pair.h.point_at(Branch::Lower, start).slope, fl0 = pair.f.point_at(Branch::Lower, start).slope;
  const bool lower_hypothesis = hl0 < fl0;
  for (const auto& r : rep.rows) {
    if (r.x <= start) continue;
    if (!record(rep, cfg, r.x, "h+' > f+'", r.h_upper_slope, r.f_upper_slope)) rep.derivative_ok = false;
    if (lower_hypothesis) {
      if (!record(rep, cfg, r.x, "h-' < f-'", r.f_lower_slope, r.h_lower_slope)) {
        rep.lower_derivative_ok = false;
        rep.derivative_ok = false;
      }
      if (!(r.h_upper_slope < r.f_upper_slope)) rep.literal_lower_reading_ok = false;
    }
  }
  if (!lower_hypothesis) rep.literal_lower_reading_ok = false;
  return rep;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& r) {
  os << "x,h_upper,f_upper,h_upper_slope,f_upper_slope,h_lower,f_lower,h_lower_slope,f_lower_slope\n";
  for (const auto& row : r.rows)
    os << format_double(row.x) << ',' << format_double(row.h_upper) << ',' << format_double(row.f_upper) << ','
       << format_double(row.h_upper_slope) << ',' << format_double(row.f_upper_slope) << ','
       << format_double(row.h_lower) << ',' << format_double(row.f_lower) << ',' << format_double(row.h_lower_slope)
       << ',' << format_double(row.f_lower_slope) << '\n';
}

NecksizeReport behavior_across_necksizes(const PrescribedFunction& h, const std::vector<double>& r_list,
                                         const IntegratorConfig& cfg) {
  NecksizeReport rep;
  rep.h_spec = h.describe();
  std::vector<std::future<NecksizeRow>> jobs;
  for (double r : r_list)
    jobs.push_back(std::async(std::launch::async, [&h, &cfg, r] {
      const auto c = integrate_catenoid(h, r, cfg);
      return NecksizeRow{r, classify_end(c, Branch::Upper), classify_end(c, Branch::Lower)};
    }));
  for (auto& j : jobs) rep.rows.push_back(j.get());
  auto agree = [&](auto pick) {
    std::optional<Verdict> seen;
    for (const auto& row : rep.rows) {
      const Verdict v = pick(row).verdict;
      if (v == Verdict::Inconclusive) continue;
      if (seen && *seen != v) return false;
      seen = v;
    }
    return true;
  };
  rep.upper_agree = agree([](const NecksizeRow& r) -> const EndClassification& { return r.upper; });
  rep.lower_agree = agree([](const NecksizeRow& r) -> const EndClassification& { return r.lower; });
  rep.pass = rep.upper_agree && rep.lower_agree;
  return rep;
}

TransferReport equivalence_behavior(const PrescribedFunction& h, const PrescribedFunction& f, double r0,
                                    const std::vector<Endpoint>& endpoints, const IntegratorConfig& cfg) {
  TransferReport rep;
  rep.h_spec = h.describe();
  rep.f_spec = f.describe();
  rep.r0 = r0;
  std::vector<EquivalenceReport> ratios;
  for (Endpoint e : endpoints) {
    auto ratio = limit_ratio(h, f, e);
    if (!ratio.converged)
      throw PreconditionError(std::string("prescriptions are not equivalent at y=") +
                              (e == Endpoint::Plus ? "1" : "-1"));
    ratios.push_back(std::move(ratio));
  }
  const auto pair = integrate_pair(h, f, r0, cfg);
  rep.pass = true;
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    TransferEnd end;
    end.endpoint = endpoints[i];
    end.ratio = ratios[i];
    const Branch b = endpoints[i] == Endpoint::Plus ? Branch::Upper : Branch::Lower;
    end.h_end = classify_end(pair.h, b);
    end.f_end = classify_end(pair.f, b);
    end.inconclusive = end.h_end.verdict == Verdict::Inconclusive || end.f_end.verdict == Verdict::Inconclusive;
    end.agree = end.h_end.verdict == end.f_end.verdict;
    if (!end.inconclusive && !end.agree) rep.pass = false;
    rep.ends.push_back(std::move(end));
  }
  return rep;
}

CoverReport double_cover_convergence(const PrescribedFunction& h, const std::vector<double>& r_sequence, double x_lo,
                                     double x_hi, const IntegratorConfig& cfg) {
  if (r_sequence.empty()) throw std::invalid_argument("double_cover_convergence: empty necksize sequence");
  for (std::size_t i = 1; i < r_sequence.size(); ++i)
    if (!(r_sequence[i] < r_sequence[i - 1]))
      throw std::invalid_argument("double_cover_convergence: necksizes must be strictly decreasing");
  if (!(x_hi > x_lo)) throw std::invalid_argument("double_cover_convergence: empty window");
  const double r_max = *std::max_element(r_sequence.begin(), r_sequence.end());
  if (!(x_lo > r_max))
    throw std::invalid_argument("double_cover_convergence: window [" + format_double(x_lo) + ", " +
                                format_double(x_hi) + "] meets the waist disk of radius " + format_double(r_max));
  CoverReport rep;
  rep.x_lo = x_lo;
  rep.x_hi = x_hi;
  rep.cover_tol = 0.05 * x_hi;
  const auto xs = log_ladder(x_lo, x_hi, 64);
  std::vector<std::future<CoverRow>> jobs;
  for (double r : r_sequence)
    jobs.push_back(std::async(std::launch::async, [&, r] {
      IntegratorConfig local = cfg;
      local.x_max = x_hi;
      const auto c = integrate_catenoid(h, r, local);
      CoverRow row;
      row.r0 = r;
      for (double x : xs) {
        const double up = std::abs(height_at(c, Branch::Upper, x));
        const double lo = std::abs(height_at(c, Branch::Lower, x));
        row.sup_upper = std::max(row.sup_upper, up);
        row.sup_lower = std::max(row.sup_lower, lo);
        if (std::max(up, lo) > row.sup) {
          row.sup = std::max(up, lo);
          row.argmax = x;
        }
      }
      return row;
    }));
  for (auto& j : jobs) rep.rows.push_back(j.get());
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].sup < rep.rows[i - 1].sup)) rep.strictly_decreasing = false;
  rep.final_below_tol = rep.rows.back().sup < rep.cover_tol;
  rep.pass = rep.strictly_decreasing && rep.final_below_tol;
  return rep;
}

}  // namespace hcat
