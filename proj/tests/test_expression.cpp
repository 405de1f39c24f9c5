#include <doctest.h>

#include <cmath>
#include <vector>

#include "hcat/expression.hpp"

using hcat::Expression;
using hcat::ParseError;

namespace {
double ev(const char* text, double y = 0.0) { return Expression::parse(text).evaluate(y); }
}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("(1 + 2) * 3") == 9.0);
  CHECK(ev("2 ^ 3 ^ 2") == 512.0);
  CHECK(ev("-2 ^ 2") == -4.0);
  CHECK(ev("2 ^ -1") == 0.5);
  CHECK(ev("8 / 4 / 2") == 1.0);
  CHECK(ev("1 - 2 - 3") == -4.0);
  CHECK(ev("--3") == 3.0);
  CHECK(ev("y*y", 3.0) == 9.0);
}

TEST_CASE("whitespace is ignored") {
  CHECK(ev(" - ( 1 -y ^2 ) ^ 2 ", 0.5) == ev("-(1-y^2)^2", 0.5));
}

TEST_CASE("functions") {
  CHECK(ev("abs(-2.5)") == 2.5);
  CHECK(ev("exp(0)") == 1.0);
  CHECK(ev("log(1)") == 0.0);
  CHECK(ev("sqrt(16)") == 4.0);
  CHECK(ev("pow(2, 10)") == 1024.0);
  CHECK(ev("1e-3 * 2") == doctest::Approx(2e-3));
}

TEST_CASE("example expression at y = 0") { CHECK(ev("-(1 - y^2)^2 * (2 - y^2)") == -2.0); }

TEST_CASE("forward derivatives match central differences") {
  const char* texts[] = {"-(1-y^2)^2*(2-y^2)", "exp(y)*sqrt(2+y)", "log(3+y)/(1+y^2)", "pow(1.5+y, 2.5)",
                         "abs(y-0.3)^3", "y^y"};
  for (const char* t : texts) {
    const auto e = Expression::parse(t);
    for (double y : {0.1, 0.45, 0.8}) {
      const double h = 1e-6;
      const double fd = (e.evaluate(y + h) - e.evaluate(y - h)) / (2 * h);
      const auto d = e.evaluate_with_derivative(y);
      CHECK(d.value == doctest::Approx(e.evaluate(y)).epsilon(1e-15));
      CHECK(d.slope == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("several variables and aliases") {
  const auto e = Expression::parse("x1 + 10*x2 + 100*y", {"x1", "x2", "x3"}, {{"y", "x3"}});
  const std::vector<double> v = {1, 2, 3};
  CHECK(e.evaluate(v) == 321.0);
  CHECK(e.evaluate_with_derivative(v, 1).slope == 10.0);
}

TEST_CASE("parse errors carry positions") {
  auto pos = [](const char* t) {
    try {
      Expression::parse(t);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  CHECK(pos("1 +") == 3);
  CHECK(pos("(1 + 2") == 6);
  CHECK(pos("1 $ 2") == 2);
  CHECK(pos("z + 1") == 0);
  CHECK(pos("sin(y)") == 0);
  CHECK(pos("") == 0);
  CHECK(pos("2 3") == 2);
}
