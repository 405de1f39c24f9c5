#include "hcat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "hcat/numeric.hpp"

namespace hcat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWaistZone = 1.5;
constexpr double kWaistStep = 2e-3;
constexpr double kNearStep = 0.05;
struct NearStep {
  DenseStep<3> dense;  // (x, z, theta) against arc length s
  double s_end = 0.0;  // may truncate the step (turning point, x_max)
  double x_end = 0.0;
};

struct FarStep {
  DenseStep<3> dense;  // (z, q = x f', s) against t = log x
};

}  // namespace

/// One branch integrated as an "upper" branch of a possibly reflected
/// prescription, in the unscaled frame.
struct RawBranch {
  std::vector<NearStep> near;
  std::vector<FarStep> far;
  double x_end = 0.0;
  BranchTermination termination;
};

struct Catenoid::Data {
  double r0 = 0.0;
  std::array<RawBranch, 2> branches;
};

namespace {

std::size_t index(Branch b) { return b == Branch::Upper ? 0 : 1; }
double sign(Branch b) { return b == Branch::Upper ? 1.0 : -1.0; }

struct RawPoint {
  double s, x, z, theta, cos_theta, slope, curvature, dtheta_ds;
};

// Solves x(s) = target inside one near step; x is monotone on the step.
double invert_near(const NearStep& st, double target) {
  double lo = st.dense.t0, hi = st.s_end;
  double x_lo = st.dense.at(lo)[0];
  if (target <= x_lo) return lo;
  if (target >= st.x_end) return hi;
  double s = lo + (hi - lo) * (target - x_lo) / (st.x_end - x_lo);
  for (int it = 0; it < 200; ++it) {
    const double x = st.dense.at(s)[0];
    const double err = x - target;
    if (err == 0.0) return s;
    if (err < 0) lo = s; else hi = s;
    const double dx = st.dense.derivative_at(s)[0];
    double next = dx > 0 ? s - err / dx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-16 * std::max(1.0, std::abs(s)))
      return next;
    s = next;
  }
  return s;
}

RawPoint raw_point(const RawBranch& br, double r0, double x) {
  if (!(x > r0) || x > br.x_end * (1.0 + 1e-14))
    throw std::out_of_range("radius " + format_double(x) + " outside the integrated range (" + format_double(r0) +
                            ", " + format_double(br.x_end) + "]");
  x = std::min(x, br.x_end);
  RawPoint p{};
  p.x = x;
  const bool in_near = !br.near.empty() && (br.far.empty() || x <= br.near.back().x_end);
  if (in_near) {
    auto it = std::lower_bound(br.near.begin(), br.near.end(), x,
                               [](const NearStep& st, double v) { return st.x_end < v; });
    if (it == br.near.end()) it = std::prev(br.near.end());
    const double s = invert_near(*it, x);
    const auto y = it->dense.at(s);
    const auto d = it->dense.derivative_at(s);
    p.s = s;
    p.z = y[1];
    p.theta = y[2];
    p.cos_theta = std::cos(y[2]);
    p.slope = std::tan(y[2]);
    p.dtheta_ds = d[2];
    p.curvature = d[2] / (p.cos_theta * p.cos_theta * p.cos_theta);
    return p;
  }
  const double t = std::log(x);
  auto it = std::upper_bound(br.far.begin(), br.far.end(), t,
                             [](double v, const FarStep& st) { return v < st.dense.t0; });
  if (it != br.far.begin()) --it;
  const auto y = it->dense.at(t);
  const auto d = it->dense.derivative_at(t);
  const double q = y[1], slope = q / x;
  const double w = std::sqrt(1.0 + slope * slope);
  p.s = y[2];
  p.z = y[0];
  p.slope = slope;
  p.theta = std::atan(slope);
  p.cos_theta = 1.0 / w;
  p.curvature = (d[1] - q) / (x * x);
  p.dtheta_ds = p.curvature / (w * w * w);
  return p;
}

// Integrates the upper branch of the prescription g from the waist.
RawBranch integrate_raw(const std::function<double(double)>& g, double r0, const IntegratorConfig& cfg) {
  RawBranch br;
  const double x_max = cfg.resolved_x_max(r0);
  const double x_switch = cfg.far_field_start * r0;
  const StepControl ctl{cfg.rel_tol, cfg.abs_tol, 1e-14 * std::min(1.0, r0)};

  auto checked = [&](double y) {
    const double v = g(y);
    if (!std::isfinite(v)) throw std::domain_error("prescription is not finite at y=" + format_double(y));
    return v;
  };
  auto near_rhs = [&](double, const std::array<double, 3>& y, std::array<double, 3>& dy) {
    const double c = std::cos(y[2]), s = std::sin(y[2]);
    dy[0] = c;
    dy[1] = s;
    dy[2] = 2.0 * checked(std::clamp(c, -1.0, 1.0)) - s / y[0];
  };

  Dopri5<3> near(near_rhs, 0.0, {r0, 0.0, kPi / 2}, 1e-3 * r0, ctl);
  long steps = 0;
  bool go_far = false;
  auto fail = [&](Termination reason, const std::string& detail) {
    br.termination.reason = reason;
    br.termination.detail = detail;
  };

  for (;;) {
    if (++steps > cfg.max_steps) {
      fail(Termination::StepFailure, "max_steps exceeded");
      break;
    }
    NearStep st;
    // the dense derivative is only fourth order; short steps keep it accurate where theta bends fastest
    const double cap = near.y()[0] < kWaistZone * r0 ? kWaistStep * r0 : kNearStep * near.y()[0];
    if (!near.advance(near_rhs, near.t() + cap, st.dense)) {
      fail(Termination::StepFailure, "step-size underflow at s=" + format_double(near.t()));
      break;
    }
    const auto y1 = near.y();
    st.s_end = st.dense.t1();
    st.x_end = y1[0];
    if (std::cos(y1[2]) <= 0.0) {
      // x stops increasing: locate cos(theta) = 0 inside the step
      double lo = st.dense.t0, hi = st.dense.t1();
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::cos(st.dense.at(mid)[2]) > 0.0 ? lo : hi) = mid;
      }
      st.s_end = lo;
      st.x_end = st.dense.at(lo)[0];
      if (st.s_end > st.dense.t0) br.near.push_back(st);
      fail(Termination::TurningPoint, "radius stops increasing (turning point)");
      break;
    }
    if (y1[0] >= x_max) {
      br.near.push_back(st);
      NearStep& last = br.near.back();
      last.s_end = invert_near(last, x_max);
      last.x_end = x_max;
      fail(Termination::ReachedXMax, "");
      break;
    }
    br.near.push_back(st);
    if (y1[0] >= x_switch && std::cos(y1[2]) >= 0.5) {
      go_far = true;
      break;
    }
  }

  if (go_far) {
    const auto y1 = near.y();
    const double x1 = y1[0];
    auto far_rhs = [&](double t, const std::array<double, 3>& y, std::array<double, 3>& dy) {
      const double x = std::exp(t);
      const double p = y[1] / x;
      const double w = std::sqrt(1.0 + p * p);
      const double h = checked(1.0 / w);
      dy[0] = y[1];
      dy[1] = x * (2.0 * x * h * w * w * w - p * p * p);
      dy[2] = x * w;
    };
    const double t_end = std::log(x_max);
    Dopri5<3> far(far_rhs, std::log(x1), {y1[1], x1 * std::tan(y1[2]), near.t()}, 0.05, ctl);
    for (;;) {
      if (++steps > cfg.max_steps) {
        fail(Termination::StepFailure, "max_steps exceeded");
        break;
      }
      FarStep st;
      if (!far.advance(far_rhs, t_end, st.dense)) {
        fail(Termination::StepFailure, "step-size underflow at x=" + format_double(std::exp(far.t())));
        break;
      }
      br.far.push_back(st);
      const double slope = far.y()[1] / std::exp(far.t());
      if (!(std::abs(slope) < std::sqrt(3.0))) {
        fail(Termination::StepFailure, "slope left the far-field graph regime");
        break;
      }
      if (far.t() >= t_end) {
        fail(Termination::ReachedXMax, "");
        break;
      }
    }
  }

  if (!br.far.empty())
    br.x_end = std::exp(br.far.back().dense.t1());
  else if (!br.near.empty())
    br.x_end = br.near.back().x_end;
  else
    br.x_end = r0;
  if (br.termination.reason == Termination::ReachedXMax && !br.far.empty()) br.x_end = x_max;

  if (br.x_end > r0) {
    const auto p = raw_point(br, r0, br.x_end);
    br.termination.where = {p.s, p.x, p.z, p.theta, p.cos_theta};
  } else {
    br.termination.where = {0.0, r0, 0.0, kPi / 2, 0.0};
  }
  return br;
}

ProfileState to_physical(const RawPoint& p, Branch b, double lambda) {
  const double sg = sign(b);
  ProfileState st;
  st.s = sg * lambda * p.s;
  st.x = lambda * p.x;
  st.z = sg * lambda * p.z;
  st.theta = b == Branch::Upper ? p.theta : kPi - p.theta;
  st.nu = sg * p.cos_theta;
  return st;
}

}  // namespace

double sff_norm_sq_from_angle(double h_of_nu, double nu, double x) {
  const double k = std::sqrt(std::max(0.0, (1.0 - nu) * (1.0 + nu))) / x;
  return 4.0 * h_of_nu * h_of_nu + 2.0 * k * (k - 2.0 * h_of_nu);
}

double sff_norm_sq_from_angle(double h_of_nu, double, double x, double sin_theta) {
  const double k = std::abs(sin_theta) / x;
  return 4.0 * h_of_nu * h_of_nu + 2.0 * k * (k - 2.0 * h_of_nu);
}

Catenoid::Catenoid(PrescribedFunction h, double r0, IntegratorConfig cfg, std::shared_ptr<const Data> data,
                   double length_scale)
    : prescription_(std::move(h)), necksize_(r0), config_(cfg), data_(std::move(data)), length_scale_(length_scale) {
  for (Branch b : {Branch::Upper, Branch::Lower}) {
    const auto& raw = data_->branches[index(b)];
    auto& out = states_[index(b)];
    out.push_back({0.0, necksize_, 0.0, kPi / 2, 0.0});
    if (raw.x_end > data_->r0) {
      for (double x : log_ladder(1.001 * data_->r0, raw.x_end, config_.dense_spacing > 0 ? config_.dense_spacing : 32))
        out.push_back(to_physical(raw_point(raw, data_->r0, x), b, length_scale_));
    }
    BranchTermination t = raw.termination;
    RawPoint wp{t.where.s, t.where.x, t.where.z, t.where.theta, std::cos(t.where.theta), 0, 0, 0};
    if (raw.x_end > data_->r0) wp.cos_theta = t.where.nu;
    t.where = to_physical(wp, b, length_scale_);
    terminations_[index(b)] = t;
  }
}

const std::vector<ProfileState>& Catenoid::states(Branch b) const { return states_[index(b)]; }

const BranchTermination& Catenoid::termination(Branch b) const { return terminations_[index(b)]; }

double Catenoid::max_radius(Branch b) const { return length_scale_ * data_->branches[index(b)].x_end; }

std::vector<double> Catenoid::checkpoint_radii(Branch b) const {
  std::vector<double> xs;
  const auto& st = states(b);
  for (std::size_t i = 1; i < st.size(); ++i) xs.push_back(st[i].x);
  return xs;
}

BranchPoint Catenoid::point_at(Branch b, double x) const {
  const double lambda = length_scale_;
  const auto p = raw_point(data_->branches[index(b)], data_->r0, x / lambda);
  BranchPoint out;
  out.state = to_physical(p, b, lambda);
  out.state.x = x;
  const double sg = sign(b);
  out.slope = sg * p.slope;
  out.curvature = sg * p.curvature / lambda;
  out.kappa1 = p.dtheta_ds / lambda;
  return out;
}

Catenoid integrate_catenoid(const PrescribedFunction& h, double r0, const IntegratorConfig& cfg) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("integrate_catenoid: necksize must be positive");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("integrate_catenoid: tolerances must be positive");
  if (!(cfg.resolved_x_max(r0) > r0)) throw std::invalid_argument("integrate_catenoid: x_max must exceed r0");
  auto data = std::make_shared<Catenoid::Data>();
  data->r0 = r0;
  data->branches[0] = integrate_raw([&h](double y) { return h(y); }, r0, cfg);
  // the lower branch is the reflection z -> -z of the upper branch of H(-y)
  data->branches[1] = integrate_raw([&h](double y) { return h(-y); }, r0, cfg);
  return Catenoid(h, r0, cfg, std::move(data), 1.0);
}

double height_at(const Catenoid& c, Branch b, double x) { return c.point_at(b, x).state.z; }

double slope_at(const Catenoid& c, Branch b, double x) { return c.point_at(b, x).slope; }

double angle_at(const Catenoid& c, Branch b, double x) { return c.point_at(b, x).state.theta; }

CurvatureSample curvature_at(const Catenoid& c, Branch b, double x) {
  const auto p = c.point_at(b, x);
  CurvatureSample cs;
  cs.x = x;
  cs.nu = p.state.nu;
  const double h = c.prescription()(cs.nu);
  const double sin_theta = std::sin(p.state.theta);
  cs.kappa2 = sin_theta / x;
  cs.kappa1 = 2.0 * h - cs.kappa2;
  cs.kappa1_dense = p.kappa1;
  cs.sff_norm_sq = cs.kappa1 * cs.kappa1 + cs.kappa2 * cs.kappa2;
  cs.sff_norm_sq_formula = sff_norm_sq_from_angle(h, cs.nu, x, sin_theta);
  return cs;
}

double residual(const Catenoid& c, Branch b, double x) {
  const auto p = c.point_at(b, x);
  const double fp = p.slope, fpp = p.curvature;
  const double w = std::sqrt(1.0 + fp * fp);
  const double nu_f = 1.0 / w;
  const double graph_mean = fpp / (w * w * w) + fp / (x * w);
  if (b == Branch::Upper) return std::abs(2.0 * c.prescription()(nu_f) - graph_mean);
  return std::abs(2.0 * c.prescription()(-nu_f) + graph_mean);
}

Catenoid scale(const Catenoid& c, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("scale: lambda must be positive");
  if (lambda == 1.0) return c;
  IntegratorConfig cfg = c.config();
  cfg.x_max = lambda * cfg.resolved_x_max(c.necksize());
  return c.rescaled(lambda, cfg);
}

double necksize_for_angle(const PrescribedFunction& h, double x_target, double nu_target, const IntegratorConfig& cfg) {
  if (!(x_target > 0.0)) throw std::invalid_argument("necksize_for_angle: target radius must be positive");
  if (!(nu_target > 0.0 && nu_target < 1.0)) throw std::invalid_argument("necksize_for_angle: nu must lie in (0, 1)");
  auto nu_at = [&](double r) {
    IntegratorConfig local = cfg;
    local.x_max = x_target;
    const auto c = integrate_catenoid(h, r, local);
    if (c.max_radius(Branch::Upper) < x_target) {
      if (c.termination(Branch::Upper).reason == Termination::TurningPoint) return 0.0;
      throw std::runtime_error("necksize_for_angle: branch of necksize " + format_double(r) + " ends before x_target");
    }
    return c.point_at(Branch::Upper, x_target).state.nu;
  };
  // nu(x_target) decreases from 1 (r -> 0) to 0 (r -> x_target)
  double lo = std::log(x_target * 1e-12), hi = std::log(x_target * (1.0 - 1e-9));
  if (nu_at(std::exp(lo)) < nu_target) throw std::runtime_error("necksize_for_angle: target angle not bracketed");
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (nu_at(std::exp(mid)) > nu_target ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace hcat
