#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcat/numeric.hpp"
#include "hcat/profile.hpp"

using namespace hcat;

namespace {

// Minimal catenoid of necksize r0.
double g(double x, double r0 = 1.0) { return r0 * std::log((x + std::sqrt(x * x - r0 * r0)) / r0); }
double g_prime(double x, double r0 = 1.0) { return r0 / std::sqrt(x * x - r0 * r0); }

IntegratorConfig reach(double x_max) {
  IntegratorConfig cfg;
  cfg.x_max = x_max;
  return cfg;
}

// Fixed-step RK4 on the graph equation f'' = (1+f'^2)^(3/2) (2H(nu) - f'/(x sqrt(1+f'^2))).
std::pair<double, double> graph_rk4(const PrescribedFunction& h, double x, double f, double p, double x_end,
                                    int steps) {
  auto rhs = [&](double t, double slope) {
    const double w = std::sqrt(1 + slope * slope);
    return w * w * w * (2 * h(1 / w) - slope / (t * w));
  };
  const double dx = (x_end - x) / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1f = p, k1p = rhs(x, p);
    const double k2f = p + 0.5 * dx * k1p, k2p = rhs(x + 0.5 * dx, p + 0.5 * dx * k1p);
    const double k3f = p + 0.5 * dx * k2p, k3p = rhs(x + 0.5 * dx, p + 0.5 * dx * k2p);
    const double k4f = p + dx * k3p, k4p = rhs(x + dx, p + dx * k3p);
    f += dx / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    p += dx / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += dx;
  }
  return {f, p};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("waist state") {
  for (double r0 : {0.5, 1.0, 3.0}) {
    const auto c = integrate_catenoid(power_law(2), r0, reach(100 * r0));
    for (Branch b : {Branch::Upper, Branch::Lower}) {
      const auto& w = c.states(b).front();
      CHECK(w.s == 0.0);
      CHECK(w.x == r0);
      CHECK(w.z == 0.0);
      CHECK(w.nu == 0.0);
      CHECK(w.theta == doctest::Approx(M_PI / 2).epsilon(1e-15));
    }
    CHECK(std::abs(height_at(c, Branch::Upper, r0 * (1 + 1e-9))) < 1e-3 * r0);
    CHECK(angle_at(c, Branch::Upper, r0 * (1 + 1e-12)) == doctest::Approx(M_PI / 2).epsilon(1e-4));
  }
}

TEST_CASE("waist row of the profile CSV") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(10));
  std::ostringstream os;
  write_profile_csv(os, c, {Branch::Upper});
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header == "s,x,z,theta,nu,kappa1,kappa2,sff_norm_sq,branch");
  const auto cells = split(first);
  REQUIRE(cells.size() == 9);
  CHECK(std::stod(cells[1]) == 1.0);
  CHECK(std::stod(cells[2]) == 0.0);
  CHECK(std::stod(cells[5]) == -3.0);
  CHECK(std::stod(cells[6]) == 1.0);
  CHECK(cells[8] == "upper");
}

TEST_CASE("minimal catenoid matches the closed form") {
  const auto c = integrate_catenoid(constant(0.0), 1.0, reach(100));
  CHECK(height_at(c, Branch::Upper, 2.0) == doctest::Approx(1.3169578969).epsilon(1e-9));
  CHECK(std::abs(height_at(c, Branch::Upper, 10.0) / std::log(10 + std::sqrt(99.0)) - 1) <= 1e-8);
  CHECK(slope_at(c, Branch::Upper, 2.0) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-8));
  CHECK(height_at(c, Branch::Lower, 2.0) == doctest::Approx(-g(2.0)).epsilon(1e-9));
  CHECK(slope_at(c, Branch::Lower, 2.0) == doctest::Approx(-g_prime(2.0)).epsilon(1e-8));
  for (double x : log_ladder(1.001, 100, 16)) {
    CHECK(std::abs(height_at(c, Branch::Upper, x) - g(x)) <= 1e-8 * g(x));
    CHECK(std::abs(slope_at(c, Branch::Upper, x) - g_prime(x)) <= 1e-8 * g_prime(x));
    const auto k = curvature_at(c, Branch::Upper, x);
    CHECK(std::abs(k.kappa1 + k.kappa2) <= 1e-9 * k.kappa2);
    CHECK(residual(c, Branch::Upper, x) <= 1e-8);
  }
}

TEST_CASE("residual expression vanishes on the closed form") {
  for (double x : log_ladder(1.001, 1e4, 8)) {
    const double p = g_prime(x), pp = -x / std::pow(x * x - 1, 1.5);
    const double w = std::sqrt(1 + p * p);
    CHECK(std::abs(pp / (w * w * w) + p / (x * w)) <= 1e-9);
  }
}

TEST_CASE("slope and angle function") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(1e4));
  CHECK(height_at(c, Branch::Upper, 100) > height_at(c, Branch::Upper, 10));
  CHECK(height_at(c, Branch::Upper, 10) > 0);
  CHECK(slope_at(c, Branch::Upper, 1 + 1e-10) > 1e3);
  double prev = INFINITY;
  for (double x : c.checkpoint_radii(Branch::Upper)) {
    const double p = slope_at(c, Branch::Upper, x);
    CHECK(std::abs(1 / std::sqrt(1 + p * p) - std::cos(angle_at(c, Branch::Upper, x))) <= 1e-12);
    CHECK(x * p < prev);
    prev = x * p;
  }
  CHECK_THROWS_AS(height_at(c, Branch::Upper, 0.5), std::out_of_range);
  CHECK_THROWS_AS(height_at(c, Branch::Upper, 2e4), std::out_of_range);
}

TEST_CASE("curvature") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(1e6));
  const auto w = curvature_at(c, Branch::Upper, 1 + 1e-12);
  CHECK(w.kappa2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.kappa1 == doctest::Approx(-3.0).epsilon(1e-6));
  for (Branch b : {Branch::Upper, Branch::Lower})
    for (double x : c.checkpoint_radii(b)) {
      const auto k = curvature_at(c, b, x);
      const double direct = k.kappa1 * k.kappa1 + k.kappa2 * k.kappa2;
      CHECK(std::abs(k.sff_norm_sq - direct) <= 1e-12 * direct);
      CHECK(std::abs(k.sff_norm_sq_formula - direct) <= 1e-9 * direct);
      CHECK(std::abs(k.kappa1_dense - k.kappa1) <= 1e-6 * (std::abs(k.kappa1) + k.kappa2));
    }
  // closed-form sff of the minimal catenoid: 2 r0^2 / x^4
  const auto m = integrate_catenoid(constant(0.0), 1.0, reach(100));
  for (double x : {1.5, 3.0, 50.0}) {
    const auto k = curvature_at(m, Branch::Upper, x);
    CHECK(k.sff_norm_sq == doctest::Approx(2 / std::pow(x, 4)).epsilon(1e-8));
  }
}

TEST_CASE("residual oracle") {
  for (auto [alpha, r0] : {std::pair{2.0, 1.0}, {1.5, 2.0}, {3.0, 0.5}}) {
    const auto c = integrate_catenoid(power_law(alpha), r0);
    for (Branch b : {Branch::Upper, Branch::Lower})
      for (double x : c.checkpoint_radii(b)) CHECK(residual(c, b, x) <= 1e-7);
  }
  const auto odd = integrate_catenoid(parsed_expression("-(1-y^2)^2*(1.5+0.5*y)"), 1.0, reach(1e4));
  for (Branch b : {Branch::Upper, Branch::Lower})
    for (double x : odd.checkpoint_radii(b)) CHECK(residual(odd, b, x) <= 1e-7);
  CHECK(std::isfinite(residual(integrate_catenoid(power_law(2), 1.0, reach(10)), Branch::Upper, 1 + 1e-9)));
}

TEST_CASE("graph equation reproduces the arc-length solution") {
  for (const auto& h : {power_law(2), parsed_expression("-(1-y^2)^2*(1.5+0.5*y)")}) {
    const auto c = integrate_catenoid(h, 1.0, reach(100));
    const double xa = 2.0, xb = 20.0;
    const auto [f, p] = graph_rk4(h, xa, height_at(c, Branch::Upper, xa), slope_at(c, Branch::Upper, xa), xb, 20000);
    CHECK(std::abs(f - height_at(c, Branch::Upper, xb)) <= 1e-9 * std::abs(f));
    CHECK(std::abs(p - slope_at(c, Branch::Upper, xb)) <= 1e-9 * std::abs(p));
  }
}

TEST_CASE("angle function is monotone and tends to the poles") {
  for (double alpha : {1.5, 2.0, 3.0}) {
    const auto c = integrate_catenoid(power_law(alpha), 1.0, reach(1e4));
    const auto& up = c.states(Branch::Upper);
    const auto& lo = c.states(Branch::Lower);
    for (std::size_t i = 1; i < up.size(); ++i) {
      CHECK(up[i].nu > up[i - 1].nu);
      CHECK(up[i].x > up[i - 1].x);
      CHECK(up[i].z > up[i - 1].z);
      CHECK(up[i].nu == doctest::Approx(std::cos(up[i].theta)).epsilon(1e-15));
    }
    for (std::size_t i = 1; i < lo.size(); ++i) {
      CHECK(lo[i].nu < lo[i - 1].nu);
      CHECK(lo[i].z < lo[i - 1].z);
      CHECK(lo[i].theta > M_PI / 2);
      CHECK(lo[i].theta < M_PI);
    }
    CHECK(up.back().nu >= 0.99);
    CHECK(up.back().nu <= 1.0);
    CHECK(lo.back().nu <= -0.99);
  }
}

TEST_CASE("scale contract") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(1e3));
  const auto same = scale(c, 1.0);
  for (double x : {1.5, 10.0, 500.0}) CHECK(height_at(same, Branch::Upper, x) == height_at(c, Branch::Upper, x));
  for (double lambda : {0.5, 2.0}) {
    const auto s = scale(c, lambda);
    CHECK(s.necksize() == lambda);
    const auto direct = integrate_catenoid(scaled(power_law(2), 1 / lambda), lambda, reach(1e3 * lambda));
    for (Branch b : {Branch::Upper, Branch::Lower})
      for (double x : log_ladder(1.01 * lambda, 1e3 * lambda, 8)) {
        const double a = height_at(s, b, x), d = height_at(direct, b, x);
        CHECK(std::abs(a - d) <= 1e-8 * std::abs(d));
        CHECK(angle_at(s, b, x) == doctest::Approx(angle_at(c, b, x / lambda)).epsilon(1e-14));
      }
  }
  const auto m2 = scale(integrate_catenoid(constant(0.0), 1.0, reach(100)), 2.0);
  for (double x : {2.5, 20.0, 150.0}) CHECK(std::abs(height_at(m2, Branch::Upper, x) - g(x, 2.0)) <= 1e-8 * g(x, 2.0));
  CHECK_THROWS_AS(scale(c, 0.0), std::invalid_argument);
}

TEST_CASE("tolerance convergence") {
  IntegratorConfig coarse = reach(1e4), fine = reach(1e4);
  coarse.rel_tol = 1e-9;
  fine.rel_tol = 5e-10;
  const auto a = integrate_catenoid(power_law(2), 1.0, coarse);
  const auto b = integrate_catenoid(power_law(2), 1.0, fine);
  for (double x : a.checkpoint_radii(Branch::Upper)) {
    const double za = height_at(a, Branch::Upper, x), zb = height_at(b, Branch::Upper, x);
    CHECK(std::abs(za - zb) <= 100 * coarse.rel_tol * std::abs(zb));
  }
}

TEST_CASE("necksize for a prescribed angle") {
  const double r = necksize_for_angle(power_law(2), 0.1, 0.99);
  CHECK(r > 0);
  CHECK(r < 0.1);
  const auto c = integrate_catenoid(power_law(2), r, reach(1.0));
  CHECK(std::cos(angle_at(c, Branch::Upper, 0.1)) == doctest::Approx(0.99).epsilon(1e-6));
  CHECK_THROWS_AS(necksize_for_angle(power_law(2), 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("mesh") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(100));
  const auto m = mesh(c, 2, 3);
  CHECK(m.vertices.size() == 12);
  CHECK(m.quads.size() == 6);
  const auto big = mesh(c, 8, 24);
  for (const auto& v : big.vertices) CHECK(std::hypot(v[0], v[1]) >= 1.0 - 1e-12);
  std::size_t waist = 0;
  for (const auto& v : big.vertices)
    if (std::abs(std::hypot(v[0], v[1]) - 1.0) < 1e-12) {
      CHECK(v[2] == 0.0);
      ++waist;
    }
  CHECK(waist >= 24);
  // orientation: inward at the waist, upward at the outer upper ring
  auto normal = [&](const std::array<std::size_t, 4>& q) {
    const auto &a = big.vertices[q[0]], &b = big.vertices[q[1]], &d = big.vertices[q[3]];
    const std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]}, w{d[0] - a[0], d[1] - a[1], d[2] - a[2]};
    return std::array<double, 3>{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
  };
  for (const auto& q : big.quads) {
    const auto n = normal(q);
    const auto& a = big.vertices[q[0]];
    const double radial = n[0] * a[0] + n[1] * a[1];
    const bool touches_waist = std::abs(std::hypot(a[0], a[1]) - 1.0) < 1e-12;
    if (touches_waist) CHECK(radial < 0);
    if (a[2] > 1.0) CHECK(n[2] > 0);
  }
  std::ostringstream os;
  write_obj(os, m);
  const std::string obj = os.str();
  CHECK(obj.find("v ") == 0);
  CHECK(obj.find("\nf ") != std::string::npos);
  CHECK_THROWS(mesh(c, 1, 3));
  CHECK_THROWS(mesh(c, 2, 2));
}

TEST_CASE("profile CSV round trip") {
  const auto c = integrate_catenoid(power_law(2), 1.0, reach(1e4));
  std::ostringstream os;
  write_profile_csv(os, c, {Branch::Upper, Branch::Lower});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  int rows = 0;
  double prev_x = 0;
  std::string prev_branch;
  while (std::getline(is, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 9);
    const double x = std::stod(cells[1]), z = std::stod(cells[2]);
    const Branch b = cells[8] == "upper" ? Branch::Upper : Branch::Lower;
    if (cells[8] == prev_branch) CHECK(x > prev_x);
    prev_branch = cells[8];
    prev_x = x;
    if (x > 1.0) CHECK(std::abs(z - height_at(c, b, x)) <= 1e-9 * std::max(1.0, std::abs(z)));
    ++rows;
  }
  CHECK(rows == static_cast<int>(c.states(Branch::Upper).size() + c.states(Branch::Lower).size()));
}

TEST_CASE("terminations and errors") {
  const auto c = integrate_catenoid(constant(-1.0), 1.0, reach(100));
  CHECK(c.termination(Branch::Upper).reason == Termination::TurningPoint);
  CHECK(c.max_radius(Branch::Upper) < 100);
  const auto ok = integrate_catenoid(power_law(2), 1.0, reach(100));
  CHECK(ok.termination(Branch::Upper).reason == Termination::ReachedXMax);
  CHECK(ok.max_radius(Branch::Upper) == doctest::Approx(100));
  CHECK_THROWS_AS(integrate_catenoid(power_law(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_catenoid(power_law(2), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_catenoid(power_law(2), 1.0, reach(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(integrate_catenoid(parsed_expression("sqrt((y-0.0005)^2-1e-8) - 1"), 1.0, reach(100)),
                  std::domain_error);
}
