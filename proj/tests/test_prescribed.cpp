#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "hcat/prescribed.hpp"

using namespace hcat;

namespace {

// Slope of log(-H) against log(1 - y^2) between two ladder points.
double two_point_order(const PrescribedFunction& h, double sign, int k1, int k2) {
  const double y1 = sign * (1 - std::pow(10.0, -k1)), y2 = sign * (1 - std::pow(10.0, -k2));
  const double w1 = (1 - y1) * (1 + y1), w2 = (1 - y2) * (1 + y2);
  return (std::log(-h(y2)) - std::log(-h(y1))) / (std::log(w2) - std::log(w1));
}

}  // namespace

TEST_CASE("evaluation examples") {
  const auto h2 = power_law(2);
  CHECK(eval(h2, 0.0) == -1.0);
  CHECK(eval(h2, 1.0) == 0.0);
  CHECK(eval(h2, -1.0) == 0.0);
  CHECK(eval(scaled(h2, 3), 0.0) == -3.0);
  CHECK(eval(h2, 0.5) == -0.5625);
  CHECK(eval(power_law(1), 0.0) == -1.0);
  CHECK(h2.derivative(0.0) == 0.0);
  CHECK(h2.derivative(0.5) == doctest::Approx(4 * 0.5 * 0.75));
}

TEST_CASE("domain violations") {
  const auto h2 = power_law(2);
  CHECK_THROWS_AS(h2(1.0000001), std::domain_error);
  CHECK_THROWS_AS(h2.derivative(-1.5), std::domain_error);
  CHECK_THROWS_AS(power_law(0.0), std::invalid_argument);
  CHECK_THROWS_AS(power_law(-1.0), std::invalid_argument);
}

TEST_CASE("scaling is the exact product") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> y(-1.0, 1.0);
  const auto base = parsed_expression("-(1-y^2)^2*(2-y^2)");
  for (double lambda : {3.0, -0.5, 1.0 / 3.0, 1e-3}) {
    const auto s = scaled(base, lambda);
    for (int i = 0; i < 200; ++i) {
      const double v = y(rng);
      CHECK(s(v) == lambda * base(v));
    }
  }
}

TEST_CASE("class membership") {
  CHECK(check_frakC1(power_law(2)).is_member);
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) CHECK(check_frakC1(power_law(a)).is_member);
  const auto c = check_frakC1(constant(-1.0));
  CHECK_FALSE(c.is_member);
  CHECK(c.value_at_plus_one == -1.0);
  const auto pos = check_frakC1(parsed_expression("1 - y^2"));
  CHECK_FALSE(pos.is_member);
  CHECK(pos.interior_max > 0.0);
  CHECK(check_frakC1(power_law(2), 16).grid_size == 16);
  CHECK_THROWS_AS(check_frakC1(power_law(2), 8), std::invalid_argument);
}

TEST_CASE("parsed expressions agree with closed forms") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto p = parsed_expression("-(1-y^2)^2");
  const auto q = parsed_expression("-(1 - y^2)^2 * (2 - y^2)");
  for (int i = 0; i < 1000; ++i) {
    const double y = dist(rng);
    const double w = 1 - y * y;
    CHECK(std::abs(p(y) - (-w * w)) <= 1e-14);
    CHECK(std::abs(q(y) - (-w * w * (2 - y * y))) <= 1e-14);
  }
  CHECK_THROWS_AS(parsed_expression("log(y)"), std::domain_error);
}

TEST_CASE("sampled tables") {
  std::vector<double> ys, vs;
  for (int i = 0; i <= 40; ++i) {
    const double y = -1.0 + i / 20.0;
    ys.push_back(y);
    vs.push_back(-(1 - y * y) * (1 - y * y));
  }
  ys.front() = -1.0;
  ys.back() = 1.0;
  const auto t = sampled_table(ys, vs);
  for (std::size_t i = 0; i < ys.size(); ++i) CHECK(t(ys[i]) == vs[i]);
  CHECK(t(0.025) == doctest::Approx(power_law(2)(0.025)).epsilon(1e-2));
  CHECK(t(0.3) < 0.0);
  CHECK(check_frakC1(t).is_member);
  CHECK_THROWS_AS(t(1.01), std::domain_error);
  CHECK_THROWS(sampled_table({-1.0, 0.5}, {0.0, 1.0}));
  CHECK_THROWS(sampled_table({-1.0, 0.5, 0.2, 1.0}, {0, 0, 0, 0}));

  const char* path = "hcat_test_table.csv";
  {
    std::ofstream out(path);
    out << "# sample\ny,H\n-1,0\n0,-1\n1,0\n";
  }
  const auto loaded = load_table(path);
  CHECK(loaded(0.0) == -1.0);
  CHECK(loaded(1.0) == 0.0);
  std::remove(path);
  CHECK_THROWS(load_table("does/not/exist.csv"));
}

TEST_CASE("vanishing order examples") {
  const auto a = vanishing_order(power_law(2), Endpoint::Plus);
  CHECK(a.converged);
  CHECK(a.alpha_hat == doctest::Approx(2.0).epsilon(1e-3));
  const auto b = vanishing_order(power_law(1.5), Endpoint::Minus);
  CHECK(b.alpha_hat == doctest::Approx(1.5).epsilon(1e-3));
  const auto perturbed = parsed_expression("-(1-y^2)^2*(2-y^2)");
  const auto c = vanishing_order(perturbed, Endpoint::Plus);
  CHECK(std::abs(c.alpha_hat - 2.0) <= 1e-2);
  // brute-force slope over the deepest two ladder points
  CHECK(std::abs(c.alpha_hat - two_point_order(perturbed, 1.0, 7, 8)) <= 1e-2);
  CHECK(c.window.size() == 7);
  CHECK_THROWS_AS(vanishing_order(parsed_expression("1-y^2"), Endpoint::Plus), std::domain_error);
}

TEST_CASE("limit ratio examples") {
  const auto h2 = power_law(2);
  const auto r = limit_ratio(h2, scaled(h2, 3), Endpoint::Plus);
  CHECK(r.converged);
  CHECK(r.ratio_limit == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(limit_ratio(power_law(1.5), h2, Endpoint::Plus).converged);
  const auto p = limit_ratio(h2, parsed_expression("-(1-y^2)^2*(2-y^2)"), Endpoint::Plus);
  CHECK(p.converged);
  CHECK(std::abs(p.ratio_limit - 1.0) <= 1e-4);
  CHECK(p.samples.size() == 9);
  for (std::size_t i = 1; i < p.samples.size(); ++i) CHECK(p.samples[i].first > p.samples[i - 1].first);
  CHECK(p.bound_low <= p.ratio_limit + 1e-12);
  CHECK(p.bound_high >= p.bound_low);
}

TEST_CASE("limit ratio skips vanishing denominators") {
  // F vanishes at y = 1 - 1e-3 only
  const auto f = parsed_expression("-(1-y^2)^2 * abs(y - 0.999) * 1000");
  const auto r = limit_ratio(power_law(2), f, Endpoint::Plus);
  CHECK(r.skipped.size() == 1);
  CHECK_THROWS(limit_ratio(power_law(2), constant(0.0), Endpoint::Plus));
}

TEST_CASE("equivalence behaves like an equivalence relation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(0.2, 5.0), tilt(-0.4, 0.4);
  std::vector<PrescribedFunction> family;
  for (int i = 0; i < 6; ++i) {
    const double a = amp(rng), t = tilt(rng);
    family.push_back(scaled(parsed_expression("-(1-y^2)^2*(1 + " + std::to_string(t) + "*y)"), a));
  }
  family.push_back(power_law(2.5));
  for (Endpoint e : {Endpoint::Plus, Endpoint::Minus}) {
    for (const auto& h : family) {
      const auto self = limit_ratio(h, h, e);
      CHECK(self.converged);
      CHECK(self.ratio_limit == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < family.size(); ++i)
      for (std::size_t j = 0; j < family.size(); ++j) {
        const auto ij = limit_ratio(family[i], family[j], e);
        const auto ji = limit_ratio(family[j], family[i], e);
        CHECK(ij.converged == ji.converged);
        if (ij.converged) CHECK(ij.ratio_limit * ji.ratio_limit == doctest::Approx(1.0).epsilon(kLimitRelTolerance));
        for (std::size_t k = 0; k < family.size(); ++k) {
          const auto jk = limit_ratio(family[j], family[k], e);
          if (ij.converged && jk.converged) CHECK(limit_ratio(family[i], family[k], e).converged);
        }
      }
  }
}
