#include "hcat/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hcat/numeric.hpp"

namespace hcat {

namespace {

double branch_sign(Branch b) { return b == Branch::Upper ? 1.0 : -1.0; }

// Integral of |f'|^p over [xa, xb] in the variable log(x - r0), which flattens
// the waist singularity f' ~ (x - r0)^(-1/2).
double integrate_slope_power(const Catenoid& c, Branch b, double p, double xa, double xb) {
  const double r0 = c.necksize();
  if (!(xb > xa)) return 0.0;
  const double ta = std::log(xa - r0), tb = std::log(xb - r0);
  const int panels = std::max(1, static_cast<int>(std::ceil((tb - ta) / 0.25)));
  const double width = (tb - ta) / panels;
  const double x_top = c.max_radius(b);
  auto integrand = [&](double t) {
    const double d = std::exp(t);
    const double x = std::min(r0 + d, x_top);
    return std::pow(std::abs(slope_at(c, b, x)), p) * d;
  };
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) acc += gauss_legendre(integrand, ta + k * width, ta + (k + 1) * width);
  return acc;
}

struct PowerTail {
  double amplitude = 0.0;  // |f'| ~ amplitude * x^-m
  double exponent = 0.0;
  bool ok = false;
};

PowerTail fit_slope_tail(const Catenoid& c, Branch b) {
  const double x_end = c.max_radius(b);
  std::vector<double> lx, lf;
  for (double x : c.checkpoint_radii(b)) {
    if (x < x_end / 10.0 * (1.0 - 1e-12)) continue;
    const double s = std::abs(slope_at(c, b, x));
    if (!(s > 0.0)) continue;
    lx.push_back(std::log(x));
    lf.push_back(std::log(s));
  }
  PowerTail t;
  const auto fit = fit_line(lx, lf);
  if (!fit.ok) return t;
  t.amplitude = std::exp(fit.intercept);
  t.exponent = -fit.slope;
  t.ok = true;
  return t;
}

}  // namespace

EndClassification classify_end(const Catenoid& c, Branch b, const ClassifyThresholds& th) {
  const double r0 = c.necksize();
  const double x_end = c.max_radius(b);
  if (x_end < th.min_reach * r0 * (1.0 - 1e-12))
    throw std::invalid_argument(std::string("classify_end: ") + to_string(b) + " branch reaches only x=" +
                                format_double(x_end) + ", needs " + format_double(th.min_reach * r0));
  EndClassification out;
  out.branch = b;
  out.thresholds = th;
  out.tail_tol = th.tail_tol_rel * r0;
  const double sg = branch_sign(b);

  for (double x : c.checkpoint_radii(b)) out.checkpoints.emplace_back(x, sg * x * slope_at(c, b, x));
  for (std::size_t i = 1; i < out.checkpoints.size(); ++i) {
    const double prev = out.checkpoints[i - 1].second, cur = out.checkpoints[i].second;
    if (cur > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
      out.monotone = false;
      out.first_increase = out.checkpoints[i].first;
      break;
    }
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  int n = 0;
  double final_sum = 0.0;
  int final_n = 0;
  for (const auto& [x, u] : out.checkpoints) {
    if (x >= x_end / 100.0 * (1.0 - 1e-12)) {
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
      ++n;
    }
    if (x >= x_end / 10.0 * (1.0 - 1e-12)) {
      final_sum += u;
      ++final_n;
    }
  }
  const double mean = sum / n;
  out.stability = mean != 0.0 ? (hi - lo) / std::abs(mean) : std::numeric_limits<double>::infinity();
  const double c0 = final_sum / final_n;

  out.height_tail = std::abs(height_at(c, b, x_end) - height_at(c, b, x_end / 10.0));
  const auto tail = fit_slope_tail(c, b);
  out.tail_estimate = tail.ok && tail.exponent > 1.0
                          ? tail.amplitude * std::pow(x_end, 1.0 - tail.exponent) / (tail.exponent - 1.0)
                          : std::numeric_limits<double>::infinity();

  if (c0 > th.c0_min && out.stability <= th.stability_max) {
    out.verdict = Verdict::Unbounded;
    out.c0 = c0;
  } else if (out.tail_estimate < out.tail_tol && out.height_tail < out.tail_tol) {
    out.verdict = Verdict::Bounded;
  }
  return out;
}

GrowthFit estimate_c0(const Catenoid& c, Branch b, std::optional<std::pair<double, double>> window,
                      const ClassifyThresholds& th) {
  const auto cls = classify_end(c, b, th);
  if (cls.verdict != Verdict::Unbounded)
    throw std::logic_error(std::string("estimate_c0: ") + to_string(b) + " end classified " + to_string(cls.verdict));
  GrowthFit g;
  g.branch = b;
  g.c0 = *cls.c0;
  const double r0 = c.necksize(), x_end = c.max_radius(b);
  for (const auto& [x, u] : cls.checkpoints)
    if (x < x_end / 10.0 * (1.0 - 1e-12)) g.remainder.emplace_back(x, u - g.c0);

  const double w_lo = window ? window->first : x_end / 10.0;
  const double w_hi = window ? window->second : x_end;
  if (!(w_lo > r0) || !(w_hi > w_lo) || w_hi > x_end * (1.0 + 1e-12))
    throw std::invalid_argument("estimate_c0: fit window outside the integrated range");
  const double sg = branch_sign(b);
  std::vector<double> xs, ds;
  for (double x : log_ladder(w_lo, std::min(w_hi, x_end), c.config().dense_spacing > 0 ? c.config().dense_spacing : 32)) {
    xs.push_back(x);
    ds.push_back(sg * height_at(c, b, x) - g.c0 * std::log(x / r0));
  }
  g.log_fit.slope = g.c0;
  g.log_fit.intercept = std::accumulate(ds.begin(), ds.end(), 0.0) / ds.size();
  g.log_fit.x_lo = w_lo;
  g.log_fit.x_hi = std::min(w_hi, x_end);
  for (double d : ds) g.fit_residual = std::max(g.fit_residual, std::abs(d - g.log_fit.intercept));
  return g;
}

MarginSeries verify_claim1_bound(const Catenoid& c) {
  MarginSeries m;
  const double r0 = c.necksize();
  m.min_margin = std::numeric_limits<double>::infinity();
  m.min_relative_margin = m.min_margin;
  for (double x : c.checkpoint_radii(Branch::Upper)) {
    const double bound = r0 / std::sqrt((x - r0) * (x + r0));
    const double margin = bound - slope_at(c, Branch::Upper, x);
    m.margins.emplace_back(x, margin);
    m.min_margin = std::min(m.min_margin, margin);
    m.min_relative_margin = std::min(m.min_relative_margin, margin / bound);
  }
  m.all_positive = !m.margins.empty() && m.min_margin > 0.0;
  return m;
}

TailIntegral tail_integral(const Catenoid& c, Branch b, double p, const ClassifyThresholds& th) {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("tail_integral: p must be positive");
  const double r0 = c.necksize();
  TailIntegral t;
  t.p = p;
  t.lower_limit = 1.001 * r0;
  t.upper_limit = c.max_radius(b);
  if (!(t.upper_limit > t.lower_limit)) throw std::invalid_argument("tail_integral: branch too short");
  t.integral = integrate_slope_power(c, b, p, t.lower_limit, t.upper_limit);
  const auto fit = fit_slope_tail(c, b);
  t.decay_exponent = fit.exponent;
  const double mp = fit.exponent * p;
  t.tail = fit.ok && mp > 1.0 ? std::pow(fit.amplitude, p) * std::pow(t.upper_limit, 1.0 - mp) / (mp - 1.0)
                              : std::numeric_limits<double>::infinity();
  t.convergent = p > 1.0 && t.tail < th.tail_tol_rel * r0;
  return t;
}

SandwichReport verify_sandwich(const Catenoid& c, double alpha, double slack) {
  SandwichReport rep;
  rep.alpha = alpha;
  rep.slack = slack;
  const auto radii = c.checkpoint_radii(Branch::Upper);
  if (radii.empty()) throw std::invalid_argument("verify_sandwich: empty upper branch");
  const double p = 2.0 * alpha - 1.0;
  const double x1 = radii.front();
  const double f1 = slope_at(c, Branch::Upper, x1);
  const double norm = std::sqrt(1.0 + f1 * f1) / (x1 * f1);
  rep.x_normalization = x1;
  rep.lower_ok = rep.upper_ok = rep.corrected_ok = true;
  double integral = 0.0, prev = x1;
  for (double x : radii) {
    integral += integrate_slope_power(c, Branch::Upper, p, prev, x);
    prev = x;
    const double fp = slope_at(c, Branch::Upper, x);
    SandwichRow r;
    r.x = x;
    r.q = x * fp / std::sqrt(1.0 + fp * fp) * norm;
    r.integral = integral;
    r.lower = std::exp(-integral);
    r.upper = std::exp(-0.5 * integral);
    r.corrected_lower = std::exp(-2.0 * integral);
    r.corrected_upper = 1.0;
    if (r.q < r.lower - slack && rep.lower_ok) {
      rep.lower_ok = false;
      rep.first_lower_violation = x;
    }
    if (r.q > r.upper + slack && rep.upper_ok) {
      rep.upper_ok = false;
      rep.first_upper_violation = x;
    }
    if (r.q < r.corrected_lower - slack || r.q > r.corrected_upper + slack) rep.corrected_ok = false;
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace hcat
