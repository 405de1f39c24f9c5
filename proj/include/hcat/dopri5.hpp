#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace hcat {

/// One accepted Dormand-Prince step with its 4th-order continuous extension.
template <std::size_t N>
struct DenseStep {
  using State = std::array<double, N>;

  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> coeff{};

  double t1() const { return t0 + h; }

  State at(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = coeff[0][i] + th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
    return y;
  }

  /// d/dt of the interpolant.
  State derivative_at(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State d;
    for (std::size_t i = 0; i < N; ++i) {
      const double c = coeff[3][i] + th1 * coeff[4][i];
      const double b = coeff[2][i] + th * c;
      const double a = coeff[1][i] + th1 * b;
      const double dc = -coeff[4][i];
      const double db = c + th * dc;
      const double da = -b + th1 * db;
      d[i] = (a + th * da) / h;
    }
    return d;
  }
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_step = 1e-14;  // relative to max(1, |t|)
};

/// Adaptive Dormand-Prince 5(4) integrator for a fixed-size system y' = f(t, y).
///
/// `advance` takes one accepted step (retrying internally on rejection) and
/// returns the dense step, or false on step-size underflow.
template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;

  template <class Rhs>
  Dopri5(Rhs& rhs, double t, const State& y, double h, StepControl ctl) : t_(t), y_(y), h_(h), ctl_(ctl) {
    rhs(t_, y_, k1_);
  }

  double t() const { return t_; }
  const State& y() const { return y_; }
  double next_step() const { return h_; }
  long evaluations() const { return evals_; }

  /// Advances by one accepted step toward `t_limit` (never past it).
  template <class Rhs>
  bool advance(Rhs& rhs, double t_limit, DenseStep<N>& out) {
    const double dir = h_ > 0 ? 1.0 : -1.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      double h = h_;
      if (dir * (t_ + h - t_limit) > 0) h = t_limit - t_;
      const double floor = ctl_.min_step * std::max(1.0, std::abs(t_));
      if (std::abs(h) < floor) return false;

      State y1, k2, k3, k4, k5, k6, k7, tmp, err;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1_[i];
      rhs(t_ + c2 * h, tmp, k2);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      rhs(t_ + c3 * h, tmp, k3);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(t_ + c4 * h, tmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(t_ + c5 * h, tmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs(t_ + h, tmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      rhs(t_ + h, y1, k7);
      evals_ += 6;

      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sk = ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        norm += (err[i] / sk) * (err[i] / sk);
        if (!std::isfinite(y1[i]) || !std::isfinite(k7[i])) finite = false;
      }
      norm = std::sqrt(norm / N);
      if (!finite) norm = std::numeric_limits<double>::infinity();

      if (norm <= 1.0) {
        out.t0 = t_;
        out.h = h;
        for (std::size_t i = 0; i < N; ++i) {
          const double ydiff = y1[i] - y_[i];
          const double bspl = h * k1_[i] - ydiff;
          out.coeff[0][i] = y_[i];
          out.coeff[1][i] = ydiff;
          out.coeff[2][i] = bspl;
          out.coeff[3][i] = ydiff - h * k7[i] - bspl;
          out.coeff[4][i] =
              h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        // PI-free controller with the usual safety factor
        const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        t_ += h;
        y_ = y1;
        k1_ = k7;
        h_ = h * fac;
        if (dir * h_ <= 0) h_ = dir * std::abs(h) * fac;
        return true;
      }
      const double fac = std::isfinite(norm) ? std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 0.9) : 0.1;
      h_ = h * fac;
    }
    return false;
  }

 private:
  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  static constexpr double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0,
                          a42 = -56.0 / 15.0, a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0,
                          a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0,
                          a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0,
                          a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                          a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  double t_;
  State y_;
  State k1_{};
  double h_;
  StepControl ctl_;
  long evals_ = 1;
};

}  // namespace hcat
