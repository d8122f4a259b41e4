#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "reiflab/errors.hpp"
#include "reiflab/expression.hpp"

using namespace reiflab;

namespace {
double eval(const char* text, Point p = {}) { return Expression::parse(text)(p); }
}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval("-2 ^ 2") == -4.0);
  CHECK(eval("1 / 256") == 1.0 / 256);
  CHECK(eval("3*pi/2") == 3 * std::numbers::pi / 2);
  CHECK(eval("1.5e-3 * 2") == doctest::Approx(3e-3));
  CHECK(eval("- -1") == 1.0);
}

TEST_CASE("variables and functions agree with libm") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const auto e = Expression::parse("sin(x) * cos(y) + exp(-z) - abs(x*y) + pow(r, 1.5) + theta");
  for (int t = 0; t < 200; ++t) {
    const Point p{U(rng), U(rng), U(rng)};
    double th = std::atan2(p[1], p[0]);
    if (th < 0) th += 2 * std::numbers::pi;
    const double rr = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    const double want = std::sin(p[0]) * std::cos(p[1]) + std::exp(-p[2]) - std::abs(p[0] * p[1]) + std::pow(rr, 1.5) + th;
    CHECK(e(p) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("theta covers [0, 2 pi)") {
  CHECK(eval("theta", {1, 0, 0}) == 0.0);
  CHECK(eval("theta", {0, -1, 0}) == doctest::Approx(1.5 * std::numbers::pi));
  CHECK(eval("theta", {-1, 0, 0}) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("syntax errors are InvalidInput") {
  for (const char* bad : {"", "1 +", "sin(", "foo(1)", "x y", "pow(1)", "2 * (3", "w", "1..2", ")"})
    CHECK_THROWS_AS(Expression::parse(bad), InvalidInput);
}
