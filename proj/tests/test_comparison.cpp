#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "hcat/comparison.hpp"

using namespace hcat;

namespace {

IntegratorConfig reach(double x_max) {
  IntegratorConfig cfg;
  cfg.x_max = x_max;
  return cfg;
}

double g(double x, double r = 1.0) { return r * std::log((x + std::sqrt(x * x - r * r)) / r); }

}  // namespace

TEST_CASE("comparison grid") {
  const auto grid = comparison_grid(1.0, 1e4);
  CHECK(grid.front() == doctest::Approx(1.001));
  CHECK(grid.back() <= 1e4);
  CHECK(grid.size() == 257);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) CHECK(grid[i] / grid[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 64)));
}

TEST_CASE("height comparison for ordered prescriptions") {
  const auto h2 = power_law(2);
  const auto rep = compare_heights(h2, scaled(h2, 2), 1.0, comparison_grid(1.0, 1e4));
  CHECK(rep.height_ok);
  CHECK_FALSE(rep.first_violation.has_value());
  CHECK(rep.rows.size() == 257);
  CHECK(rep.hypothesis_margin >= 0);
  for (const auto& r : rep.rows) {
    CHECK(r.h_upper > r.f_upper);
    CHECK(r.h_lower < r.f_lower);
  }
  CHECK_THROWS_AS(compare_heights(h2, h2, 1.0), PreconditionError);
  CHECK_THROWS_AS(compare_heights(scaled(h2, 2), h2, 1.0), PreconditionError);
}

TEST_CASE("the minimal catenoid lies above") {
  const auto rep = compare_heights(constant(0.0), power_law(2), 1.0, comparison_grid(1.0, 1e4));
  CHECK(rep.height_ok);
  for (const auto& r : rep.rows) {
    CHECK(std::abs(r.h_upper - g(r.x)) <= 1e-8 * g(r.x));
    CHECK(r.h_upper > r.f_upper);
  }
}

TEST_CASE("derivative ordering persists") {
  const auto h2 = power_law(2);
  for (const auto& [h, f] : {std::pair{h2, scaled(h2, 2)}, std::pair{constant(0.0), h2}}) {
    const auto rep = compare_derivatives(h, f, 1.0, std::nullopt, comparison_grid(1.0, 1e4));
    CHECK(rep.derivatives_checked);
    CHECK(rep.derivative_ok);
    CHECK(rep.height_ok);
    CHECK(rep.lower_derivative_ok);
    CHECK_FALSE(rep.literal_lower_reading_ok);
    REQUIRE(rep.x0.has_value());
    CHECK(*rep.x0 == doctest::Approx(1.001));
    for (const auto& r : rep.rows) {
      CHECK(r.h_upper_slope > r.f_upper_slope);
      CHECK(r.h_lower_slope < r.f_lower_slope);
    }
    CHECK(rep.indistinguishable == 0);
  }
  const auto g_vs_h2 = compare_derivatives(constant(0.0), h2, 1.0, 2.0, comparison_grid(1.0, 100));
  for (const auto& r : g_vs_h2.rows)
    if (r.x > 1.01) CHECK(r.h_upper_slope == doctest::Approx(1 / std::sqrt(r.x * r.x - 1)).epsilon(1e-8));
  CHECK_THROWS_AS(compare_derivatives(h2, h2, 1.0), PreconditionError);
}

TEST_CASE("comparison CSV") {
  const auto rep = compare_heights(power_law(2), scaled(power_law(2), 2), 1.0, comparison_grid(1.0, 10));
  std::ostringstream os;
  write_comparison_csv(os, rep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,h_upper,f_upper,h_upper_slope,f_upper_slope,h_lower,f_lower,h_lower_slope,f_lower_slope");
  std::size_t n = 0;
  while (std::getline(is, line)) ++n;
  CHECK(n == rep.rows.size());
}

TEST_CASE("verdicts agree across necksizes") {
  const auto rep = behavior_across_necksizes(power_law(2), {0.5, 1.0, 2.0});
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 3);
  CHECK(rep.rows[0].r0 == 0.5);
  for (const auto& row : rep.rows) {
    CHECK(row.upper.verdict == Verdict::Unbounded);
    CHECK(row.lower.verdict == Verdict::Unbounded);
  }
  const auto minimal = behavior_across_necksizes(constant(0.0), {0.5, 1.0});
  CHECK(minimal.pass);
  for (const auto& row : minimal.rows) CHECK(row.upper.verdict == Verdict::Unbounded);
  CHECK(behavior_across_necksizes(power_law(2), {1.0}).pass);
  for (double alpha : {1.5, 3.0}) CHECK(behavior_across_necksizes(power_law(alpha), {0.1, 1.0, 10.0}).pass);
}

TEST_CASE("equivalent prescriptions share their behavior") {
  const auto h2 = power_law(2);
  const std::vector<PrescribedFunction> partners = {
      scaled(h2, 1.0 / 3.0), parsed_expression("-(1-y^2)^2*(2-y^2)"),
      scaled(parsed_expression("-(1-y^2)^2*(1+0.3*y)"), 2.0)};
  for (const auto& f : partners) {
    const auto rep = equivalence_behavior(h2, f, 1.0);
    CHECK(rep.pass);
    REQUIRE(rep.ends.size() == 2);
    for (const auto& e : rep.ends) {
      CHECK(e.ratio.converged);
      CHECK(e.agree);
      CHECK(e.h_end.verdict == Verdict::Unbounded);
      CHECK(e.f_end.verdict == Verdict::Unbounded);
    }
  }
  const auto upper_only = equivalence_behavior(h2, partners[1], 1.0, {Endpoint::Plus});
  CHECK(upper_only.ends.size() == 1);
  CHECK_THROWS_AS(equivalence_behavior(h2, power_law(1.5), 1.0), PreconditionError);
}

TEST_CASE("double cover convergence") {
  const auto rep = double_cover_convergence(constant(0.0), {1e-1, 1e-2, 1e-3}, 0.5, 2.0);
  CHECK(rep.pass);
  CHECK(rep.strictly_decreasing);
  CHECK(rep.final_below_tol);
  CHECK(rep.cover_tol == doctest::Approx(0.1));
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.sup == doctest::Approx(g(2.0, row.r0)).epsilon(1e-8));
    CHECK(row.argmax == doctest::Approx(2.0));
  }
  const auto h2 = double_cover_convergence(power_law(2), {1e-1, 1e-2, 1e-3}, 0.5, 2.0);
  CHECK(h2.pass);
  const auto fixed = double_cover_convergence(power_law(2), {0.2}, 0.5, 3.0);
  CHECK(fixed.rows[0].argmax == doctest::Approx(3.0));
  CHECK_THROWS_AS(double_cover_convergence(constant(0.0), {1.0, 0.1}, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(double_cover_convergence(constant(0.0), {0.01, 0.1}, 0.5, 2.0), std::invalid_argument);
}
