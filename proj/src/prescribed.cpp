#include "hcat/prescribed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hcat/numeric.hpp"

namespace hcat {

struct PrescribedFunction::Impl {
  virtual ~Impl() = default;
  virtual double value(double y) const = 0;
  virtual double slope(double y) const = 0;
  virtual Kind kind() const = 0;
  virtual std::string describe() const = 0;
};

namespace {

using Kind = PrescribedFunction::Kind;

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// 1 - y^2 without cancellation near |y| = 1
inline double one_minus_square(double y) { return (1.0 - y) * (1.0 + y); }

struct PowerLaw final : PrescribedFunction::Impl {
  double alpha;
  explicit PowerLaw(double a) : alpha(a) {}
  double value(double y) const override { return -std::pow(one_minus_square(y), alpha); }
  double slope(double y) const override {
    const double w = one_minus_square(y);
    if (w == 0.0 && alpha < 1.0) return y > 0 ? std::numeric_limits<double>::infinity()
                                              : -std::numeric_limits<double>::infinity();
    return 2.0 * alpha * y * std::pow(w, alpha - 1.0);
  }
  Kind kind() const override { return Kind::PowerLaw; }
  std::string describe() const override { return "powerlaw:alpha=" + format_number(alpha); }
};

struct Polynomial final : PrescribedFunction::Impl {
  std::vector<double> coeffs;
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}
  double value(double y) const override {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + *it;
    return acc;
  }
  double slope(double y) const override {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * y + static_cast<double>(k) * coeffs[k];
    return acc;
  }
  Kind kind() const override { return Kind::Polynomial; }
  std::string describe() const override {
    std::string s = "polynomial:";
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += (k ? "," : "") + format_number(coeffs[k]);
    return s;
  }
};

struct Scaled final : PrescribedFunction::Impl {
  PrescribedFunction base;
  double factor;
  Scaled(PrescribedFunction b, double f) : base(std::move(b)), factor(f) {}
  double value(double y) const override { return factor * base(y); }
  double slope(double y) const override { return factor * base.derivative(y); }
  Kind kind() const override { return Kind::Scaled; }
  std::string describe() const override { return "scale:" + format_number(factor) + ":" + base.describe(); }
};

struct ExpressionFunction final : PrescribedFunction::Impl {
  Expression expr;
  explicit ExpressionFunction(Expression e) : expr(std::move(e)) {}
  double value(double y) const override { return expr.evaluate(y); }
  double slope(double y) const override { return expr.evaluate_with_derivative(y).slope; }
  Kind kind() const override { return Kind::Expression; }
  std::string describe() const override { return "expr:" + expr.text(); }
};

struct Table final : PrescribedFunction::Impl {
  std::vector<double> ys, values, slopes;

  Table(std::vector<double> y, std::vector<double> v) : ys(std::move(y)), values(std::move(v)) {
    const std::size_t n = ys.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (values[i + 1] - values[i]) / (ys[i + 1] - ys[i]);
    slopes.assign(n, 0.0);
    slopes[0] = delta[0];
    slopes[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        slopes[i] = 0.0;
      } else {
        // weighted harmonic mean (Fritsch-Butland), keeps each piece monotone
        const double h0 = ys[i] - ys[i - 1], h1 = ys[i + 1] - ys[i];
        const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
        slopes[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
      }
    }
    // endpoint slopes limited to preserve monotonicity of the end pieces
    for (std::size_t e : {std::size_t{0}, n - 1}) {
      const double d = e == 0 ? delta[0] : delta[n - 2];
      if (slopes[e] * d <= 0.0) slopes[e] = 0.0;
      else if (std::abs(slopes[e]) > 3.0 * std::abs(d)) slopes[e] = 3.0 * d;
    }
  }

  std::size_t interval(double y) const {
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    std::size_t i = it == ys.begin() ? 0 : static_cast<std::size_t>(it - ys.begin()) - 1;
    return std::min(i, ys.size() - 2);
  }

  double value(double y) const override {
    const std::size_t i = interval(y);
    const double h = ys[i + 1] - ys[i];
    const double t = (y - ys[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[i] + (t3 - 2 * t2 + t) * h * slopes[i] +
           (-2 * t3 + 3 * t2) * values[i + 1] + (t3 - t2) * h * slopes[i + 1];
  }

  double slope(double y) const override {
    const std::size_t i = interval(y);
    const double h = ys[i + 1] - ys[i];
    const double t = (y - ys[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * values[i] + (-6 * t2 + 6 * t) * values[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * slopes[i] + (3 * t2 - 2 * t) * slopes[i + 1];
  }

  Kind kind() const override { return Kind::Table; }
  std::string describe() const override { return "table:" + std::to_string(ys.size()) + " samples"; }
};

void check_domain(double y) {
  if (!(y >= -1.0 && y <= 1.0))
    throw std::domain_error("prescription evaluated outside [-1, 1] at y=" + format_number(y));
}

}  // namespace

double PrescribedFunction::operator()(double y) const {
  check_domain(y);
  return impl_->value(y);
}

double PrescribedFunction::derivative(double y) const {
  check_domain(y);
  return impl_->slope(y);
}

PrescribedFunction::Kind PrescribedFunction::kind() const { return impl_->kind(); }

std::string PrescribedFunction::describe() const { return impl_->describe(); }

std::optional<double> PrescribedFunction::power_law_exponent() const {
  if (auto* p = dynamic_cast<const PowerLaw*>(impl_.get())) return p->alpha;
  return std::nullopt;
}

PrescribedFunction power_law(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("power_law: exponent must be positive, got " + format_number(alpha));
  return PrescribedFunction(std::make_shared<PowerLaw>(alpha));
}

PrescribedFunction polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("polynomial: non-finite coefficient");
  return PrescribedFunction(std::make_shared<Polynomial>(std::move(coeffs)));
}

PrescribedFunction scaled(PrescribedFunction base, double factor) {
  if (factor == 0.0 || !std::isfinite(factor))
    throw std::invalid_argument("scaled: factor must be finite and nonzero");
  return PrescribedFunction(std::make_shared<Scaled>(std::move(base), factor));
}

PrescribedFunction parsed_expression(std::string_view text) {
  auto expr = Expression::parse(text);
  constexpr int kChecks = 2001;
  for (int i = 0; i < kChecks; ++i) {
    const double y = -1.0 + 2.0 * i / (kChecks - 1);
    const double v = expr.evaluate(y);
    if (!std::isfinite(v))
      throw std::domain_error("expression '" + std::string(text) + "' is not real-valued at y=" + format_number(y));
  }
  return PrescribedFunction(std::make_shared<ExpressionFunction>(std::move(expr)));
}

PrescribedFunction sampled_table(std::vector<double> ys, std::vector<double> values) {
  if (ys.size() != values.size()) throw std::invalid_argument("table: column lengths differ");
  if (ys.size() < 2) throw std::invalid_argument("table: need at least two samples");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1])) throw std::invalid_argument("table: y grid must be strictly increasing");
  if (ys.front() != -1.0 || ys.back() != 1.0) throw std::invalid_argument("table: y grid must span exactly [-1, 1]");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("table: non-finite value");
  return PrescribedFunction(std::make_shared<Table>(std::move(ys), std::move(values)));
}

PrescribedFunction load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TableFileError("table: cannot open '" + path + "'");
  std::vector<double> ys, vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a) || a[0] == '#') continue;
    if (!(ss >> b)) throw TableFileError("table: line " + std::to_string(lineno) + " has one column");
    double y = 0.0, v = 0.0;
    auto ra = std::from_chars(a.data(), a.data() + a.size(), y);
    auto rb = std::from_chars(b.data(), b.data() + b.size(), v);
    if (ra.ec != std::errc() || rb.ec != std::errc()) {
      if (ys.empty()) continue;  // header
      throw TableFileError("table: malformed number on line " + std::to_string(lineno));
    }
    ys.push_back(y);
    vs.push_back(v);
  }
  try {
    return sampled_table(std::move(ys), std::move(vs));
  } catch (const std::invalid_argument& e) {
    throw TableFileError(std::string(e.what()) + " ('" + path + "')");
  }
}

ClassMembership check_frakC1(const PrescribedFunction& h, int grid_size) {
  if (grid_size < 16) throw std::invalid_argument("check_frakC1: grid_size must be >= 16");
  ClassMembership m;
  m.grid_size = grid_size;
  m.interior_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid_size; ++j) {
    const double y = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * grid_size));
    m.interior_max = std::max(m.interior_max, h(y));
  }
  m.value_at_minus_one = h(-1.0);
  m.value_at_plus_one = h(1.0);
  m.is_member = m.interior_max < 0.0 && std::abs(m.value_at_minus_one) <= kEndpointTolerance &&
                std::abs(m.value_at_plus_one) <= kEndpointTolerance;
  return m;
}

PowerLawOrder fit_vanishing_order(const std::vector<std::pair<double, double>>& samples, Endpoint endpoint) {
  PowerLawOrder out;
  out.endpoint = endpoint;
  std::vector<double> lx, lv;
  for (const auto& [y, v] : samples) {
    if (!(v < 0.0))
      throw std::domain_error("vanishing_order: prescription is not negative at y=" + format_number(y));
    out.window.push_back(y);
    lx.push_back(std::log(one_minus_square(y)));
    lv.push_back(std::log(-v));
  }
  const auto fit = fit_line(lx, lv);
  out.alpha_hat = fit.slope;
  out.fit_residual = fit.max_residual;
  out.converged = fit.ok && std::isfinite(fit.slope) && fit.slope > 0.0;
  return out;
}

PowerLawOrder vanishing_order(const PrescribedFunction& h, Endpoint endpoint) {
  const double e = endpoint_value(endpoint);
  std::vector<std::pair<double, double>> samples;
  for (int k = 2; k <= 8; ++k) {
    const double y = e * (1.0 - std::pow(10.0, -k));
    samples.emplace_back(y, h(y));
  }
  return fit_vanishing_order(samples, endpoint);
}

EquivalenceReport limit_ratio(const PrescribedFunction& h, const PrescribedFunction& f, Endpoint endpoint) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  EquivalenceReport rep;
  rep.endpoint = endpoint;
  const double e = endpoint_value(endpoint);

  std::vector<double> noise;
  for (int k = 2; k <= 10; ++k) {
    const double gap = std::pow(10.0, -k);
    const double y = e * (1.0 - gap);
    const double fv = f(y);
    const double r = h(y) / fv;
    if (fv == 0.0 || !std::isfinite(r)) {
      rep.skipped.push_back(y);
      continue;
    }
    rep.samples.emplace_back(y, r);
    // cancellation in 1 -/+ y amplifies rounding by ~1/gap
    noise.push_back(16.0 * eps * std::abs(r) / gap);
  }
  if (rep.samples.empty()) throw std::runtime_error("limit_ratio: no valid samples (F vanishes on the whole ladder)");

  rep.bound_low = rep.bound_high = rep.samples.front().second;
  for (const auto& s : rep.samples) {
    rep.bound_low = std::min(rep.bound_low, s.second);
    rep.bound_high = std::max(rep.bound_high, s.second);
  }

  const std::size_t n = rep.samples.size();
  if (n < 3) {
    rep.ratio_limit = rep.samples.back().second;
    return rep;
  }
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double r0 = rep.samples[i].second, r1 = rep.samples[i + 1].second, r2 = rep.samples[i + 2].second;
    const double d1 = r1 - r0, d2 = r2 - r1, dd = d2 - d1;
    if (std::abs(dd) <= 4.0 * noise[i + 2])
      rep.accelerated.push_back(r2);
    else
      rep.accelerated.push_back(r2 - d2 * d2 / dd);
  }

  const double limit = rep.accelerated.back();
  rep.ratio_limit = limit;
  if (!std::isfinite(limit) || std::abs(limit) <= kNonzeroTolerance) return rep;

  bool agree = true;
  const std::size_t m = rep.accelerated.size();
  for (std::size_t j = m >= 3 ? m - 3 : 0; j < m; ++j)
    if (std::abs(rep.accelerated[j] - limit) > kLimitRelTolerance * std::abs(limit)) agree = false;

  bool contracting = true;
  const double last_step = std::abs(rep.samples[n - 1].second - rep.samples[n - 2].second);
  const double prev_step = std::abs(rep.samples[n - 2].second - rep.samples[n - 3].second);
  if (last_step > prev_step + 4.0 * noise[n - 1]) contracting = false;

  const bool raw_close = std::abs(rep.samples.back().second - limit) <= 1e-3 * std::abs(limit);
  rep.converged = agree && contracting && raw_close;
  return rep;
}

}  // namespace hcat
