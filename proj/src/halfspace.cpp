#include "hcat/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hcat/expression.hpp"
#include "hcat/profile.hpp"

namespace hcat {

namespace {

constexpr double kPi = std::numbers::pi;

double one_minus_square(double y) { return (1.0 - y) * (1.0 + y); }

double pole_sign(Endpoint e) { return endpoint_value(e); }

std::string point_text(const Vec3& x) {
  return "(" + format_double(x[0]) + ", " + format_double(x[1]) + ", " + format_double(x[2]) + ")";
}

// -H(x) / (1 - y^2)^alpha; the quantity whose sup is the amplitude.
double amplitude_ratio(const SphereFunction& hs, const Vec3& x, double alpha) {
  return -hs(x) / std::pow(one_minus_square(x[2]), alpha);
}

bool is_pole(const Vec3& x) { return one_minus_square(x[2]) == 0.0; }

// Local pattern search for the sup of the ratio in (y, phi) from a start node.
double refine_sup(const SphereFunction& hs, Endpoint e, double alpha, const Vec3& start) {
  const double sg = pole_sign(e);
  double t = std::acos(std::clamp(sg * start[2], -1.0, 1.0));  // polar angle from the pole
  double phi = std::atan2(start[1], start[0]);
  auto value = [&](double tt, double pp) {
    tt = std::clamp(tt, 1e-9, kPi / 2);
    return amplitude_ratio(hs, sphere_point(sg * std::cos(tt), pp), alpha);
  };
  double best = value(t, phi);
  double step = 0.05;
  while (step > 1e-12) {
    bool moved = false;
    for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
      const double tt = std::clamp(t + dt, 1e-9, kPi / 2);
      const double v = value(tt, phi + dp);
      if (v > best) {
        best = v;
        t = tt;
        phi += dp;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

std::vector<double> pole_ladder_ratio(const SphereFunction& hs, Endpoint e, double alpha) {
  std::vector<double> out;
  for (int k = 2; k <= 12; ++k) {
    const double y = pole_sign(e) * (1.0 - std::pow(10.0, -k));
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 8; ++j) worst = std::max(worst, amplitude_ratio(hs, sphere_point(y, 2.0 * kPi * j / 8), alpha));
    out.push_back(worst);
  }
  return out;
}

}  // namespace

SphereFunction SphereFunction::axisymmetric(PrescribedFunction h) {
  SphereFunction s;
  s.description_ = "axisymmetric:" + h.describe();
  s.fn_ = [h](const Vec3& x) { return h(std::clamp(x[2], -1.0, 1.0)); };
  s.axial_ = std::move(h);
  return s;
}

SphereFunction SphereFunction::general(std::function<double(const Vec3&)> fn, std::string description) {
  SphereFunction s;
  s.fn_ = std::move(fn);
  s.description_ = std::move(description);
  return s;
}

SphereFunction SphereFunction::parse(std::string_view text) {
  auto expr = Expression::parse(text, {"x1", "x2", "x3"}, {{"y", "x3"}});
  return general([expr](const Vec3& x) { return expr.evaluate(std::span<const double>(x.data(), 3)); },
                 "sphere:" + std::string(text));
}

Vec3 sphere_point(double y, double phi) {
  const double rho = std::sqrt(std::max(0.0, one_minus_square(y)));
  return {rho * std::cos(phi), rho * std::sin(phi), y};
}

std::vector<Vec3> hemisphere_grid(Endpoint endpoint, int nodes) {
  if (nodes < 16) throw std::invalid_argument("hemisphere grid needs at least 16 nodes");
  const double sg = pole_sign(endpoint);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> g;
  g.reserve(nodes + 64 + 88 + 1);
  for (int i = 0; i < nodes; ++i) g.push_back(sphere_point(sg * (1.0 - (i + 0.5) / nodes), golden * i));
  for (int j = 0; j < 64; ++j) g.push_back(sphere_point(0.0, 2.0 * kPi * j / 64));
  for (int k = 1; k <= 12; ++k)
    for (int j = 0; j < 8; ++j) g.push_back(sphere_point(sg * (1.0 - std::pow(10.0, -k)), 2.0 * kPi * (j + 0.5) / 8));
  g.push_back({0.0, 0.0, sg});
  return g;
}

double Minorant::operator()(double y) const { return -c * std::pow(one_minus_square(y), alpha); }

Minorant verify_minorant(const SphereFunction& hs, Minorant m, int nodes) {
  m.margin = std::numeric_limits<double>::infinity();
  for (const auto& x : hemisphere_grid(m.endpoint, nodes)) {
    const double d = hs(x) - m(x[2]);
    if (!std::isfinite(d)) throw std::domain_error("prescription not finite at " + point_text(x));
    if (d < m.margin) {
      m.margin = d;
      m.margin_at = x;
    }
  }
  return m;
}

MinorantFit fit_minorant(const SphereFunction& hs, Endpoint endpoint, int nodes) {
  MinorantFit fit;
  const auto grid = hemisphere_grid(endpoint, nodes);
  for (const auto& x : grid) {
    const double v = hs(x);
    if (!std::isfinite(v)) throw std::domain_error("prescription not finite at " + point_text(x));
    if (is_pole(x)) {
      if (std::abs(v) > kEndpointTolerance) {
        fit.failure = "prescription does not vanish at the pole (H = " + format_double(v) + ")";
        return fit;
      }
    } else if (x[2] != 0.0 && !(v < 0.0)) {
      fit.failure = "prescription is not negative at " + point_text(x);
      return fit;
    }
  }

  // axial profile: the most negative value on each parallel of the ladder
  std::vector<std::pair<double, double>> axial;
  for (int k = 2; k <= 8; ++k) {
    const double y = pole_sign(endpoint) * (1.0 - std::pow(10.0, -k));
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 16; ++j) lo = std::min(lo, hs(sphere_point(y, 2.0 * kPi * j / 16)));
    axial.emplace_back(y, lo);
  }
  const auto order = fit_vanishing_order(axial, endpoint);
  fit.vanishing_order = order.alpha_hat;
  if (!order.converged) {
    fit.failure = "vanishing order fit did not converge";
    return fit;
  }
  if (!(order.alpha_hat > 1.0)) {
    fit.failure = "vanishing order " + format_double(order.alpha_hat) + " at the pole is not above 1";
    return fit;
  }

  const double snapped = std::round(order.alpha_hat * 100.0) / 100.0;
  for (double shrink : {0.0, 0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double alpha = 1.0 + (snapped - 1.0) * (1.0 - shrink);
    if (!(alpha > 1.0)) continue;
    const auto ladder = pole_ladder_ratio(hs, endpoint, alpha);
    const double reference = *std::max_element(ladder.begin(), ladder.begin() + 5);
    if (!(ladder.back() <= reference * (1.0 + 1e-3))) continue;  // ratio still growing toward the pole

    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!is_pole(grid[i])) ranked.emplace_back(amplitude_ratio(hs, grid[i], alpha), i);
    const std::size_t top = std::min<std::size_t>(8, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + top, ranked.end(), std::greater<>());
    double sup = ranked.front().first;
    for (std::size_t i = 0; i < top; ++i) sup = std::max(sup, refine_sup(hs, endpoint, alpha, grid[ranked[i].second]));
    if (!(sup > 0.0) || !std::isfinite(sup)) continue;

    Minorant m;
    m.c = sup * (1.0 + 1e-12);
    m.alpha = alpha;
    m.endpoint = endpoint;
    fit.minorant = verify_minorant(hs, m, nodes);
    return fit;
  }
  fit.failure = "no exponent in (1, " + format_double(snapped) + "] keeps the amplitude bounded at the pole";
  return fit;
}

namespace {

PoleCheck check_pole(const SphereFunction& hs, Endpoint e, const std::optional<Minorant>& supplied,
                     const CertifyOptions& opt) {
  PoleCheck pc;
  pc.endpoint = e;
  std::optional<Minorant> m;
  if (supplied) {
    Minorant given = *supplied;
    given.endpoint = e;
    if (!(given.alpha > 1.0) || !(given.c > 0.0)) {
      pc.notes.push_back("supplied minorant needs c > 0 and alpha > 1");
      return pc;
    }
    m = verify_minorant(hs, given, opt.grid_nodes);
  } else {
    auto fit = fit_minorant(hs, e, opt.grid_nodes);
    if (!fit.minorant) {
      pc.notes.push_back("no minorant: " + fit.failure);
      return pc;
    }
    m = fit.minorant;
  }
  pc.minorant = m;
  if (m->margin < -opt.tol_margin) {
    pc.notes.push_back("minorant is not dominated: margin " + format_double(m->margin) + " at " +
                       point_text(m->margin_at));
    return pc;
  }
  const Minorant mm = *m;
  const auto fam = power_law(mm.alpha);
  pc.limit = limit_ratio(scaled(fam, mm.c), fam, e);
  if (!pc.limit->converged) {
    pc.notes.push_back("limit of F / H_alpha at the pole did not converge");
    return pc;
  }
  const auto again = verify_minorant(hs, mm, 2 * opt.grid_nodes);
  pc.reverify_margin = again.margin;
  if (again.margin < -opt.tol_margin) {
    pc.notes.push_back("re-verification at doubled resolution failed: margin " + format_double(again.margin));
    return pc;
  }
  pc.excluded = true;
  return pc;
}

}  // namespace

HalfSpaceCertificate certify(const SphereFunction& hs, const CertifyOptions& options) {
  HalfSpaceCertificate cert;
  cert.prescription = hs.describe();
  cert.grid_resolution = options.grid_nodes;
  cert.tol_margin = options.tol_margin;
  cert.north = check_pole(hs, Endpoint::Plus, options.north, options);
  cert.south = check_pole(hs, Endpoint::Minus, options.south, options);
  if (cert.north.excluded) cert.excluded.push_back("lower");
  if (cert.south.excluded) cert.excluded.push_back("upper");
  cert.verdict_notes.push_back("grid-verified on " + std::to_string(options.grid_nodes) +
                               " Fibonacci nodes per hemisphere plus pole ladder; not a proof");
  cert.verdict_notes.push_back(
      "assumed, not checked: the prescription is C^1 on the sphere and the surface is proper and nonplanar");
  if (cert.excluded.empty()) cert.verdict_notes.push_back("theorem not applicable by this tool");
  else if (cert.excluded.size() == 2)
    cert.verdict_notes.push_back("no horizontal half-space can contain such a surface");
  return cert;
}

}  // namespace hcat
