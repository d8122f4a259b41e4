#include <doctest.h>

#include <cmath>
#include <random>

#include "reiflab/elliptic_operator.hpp"
#include "reiflab/errors.hpp"

using reiflab::EllipticOperator;

namespace {

// Random symmetric positive definite coefficients: G^T G + shift.
EllipticOperator random_elliptic(int N, int m, std::mt19937_64& rng) {
  const std::size_t n = reiflab::enumerate(N, m).size();
  std::normal_distribution<double> g;
  std::vector<double> G(n * n), A(n * n, 0.0);
  for (auto& v : G) v = g(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) A[i * n + j] += G[k * n + i] * G[k * n + j];
      if (i == j) A[i * n + j] += 0.05;
    }
  return EllipticOperator(N, m, A);
}

// Power of |k|^2 by repeated multiplication.
double norm_pow(const std::vector<double>& k, int m) {
  double s = 0.0;
  for (double v : k) s += v * v;
  double out = 1.0;
  for (int i = 0; i < m; ++i) out *= s;
  return out;
}

}  // namespace

TEST_CASE("polyharmonic coefficients") {
  const auto a = EllipticOperator::polyharmonic(2, 1);
  CHECK(a.coeff(0, 0) == 1.0);
  CHECK(a.coeff(0, 1) == 0.0);
  CHECK(a.coeff(1, 1) == 1.0);

  const auto b = EllipticOperator::polyharmonic(2, 2);
  REQUIRE(b.size() == 3);
  CHECK(b.coeff(0, 0) == 1.0);
  CHECK(b.coeff(1, 1) == 2.0);
  CHECK(b.coeff(2, 2) == 1.0);
  CHECK(b.coeff(0, 2) == 0.0);

  const auto c = EllipticOperator::polyharmonic(3, 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(c.coeff(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("ellipticity constant") {
  CHECK(reiflab::ellipticity_constant(EllipticOperator::polyharmonic(2, 1)) == doctest::Approx(1.0));
  CHECK(reiflab::ellipticity_constant(EllipticOperator::polyharmonic(2, 2)) == doctest::Approx(1.0));
  // Rank-one coupling in N=1 is impossible, so use N=2, m=1.
  const EllipticOperator close(2, 1, {1.0, 0.999, 0.999, 1.0});
  CHECK(reiflab::ellipticity_constant(close) == doctest::Approx(0.001).epsilon(1e-9));
  const EllipticOperator singular(2, 1, {1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(reiflab::ellipticity_constant(singular), reiflab::NotElliptic);
  const EllipticOperator asym(2, 1, {1.0, 0.2, 0.1, 1.0});
  CHECK_THROWS_AS(reiflab::ellipticity_constant(asym), reiflab::NotElliptic);
}

TEST_CASE("jacobi eigenvalues match the 2x2 closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const double a = U(rng), b = U(rng), d = U(rng);
    const auto ev = reiflab::symmetric_eigenvalues({a, b, b, d}, 2);
    const double mean = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    CHECK(ev[0] == doctest::Approx(mean - rad).scale(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(mean + rad).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quadratic form is bounded below by the ellipticity constant") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int N = 1; N <= 3; ++N)
    for (int m = 1; m <= 3; ++m) {
      const auto op = random_elliptic(N, m, rng);
      const double lmin = reiflab::ellipticity_constant(op);
      for (int t = 0; t < 50; ++t) {
        std::vector<double> xi(op.size());
        double nn = 0.0;
        for (auto& v : xi) {
          v = g(rng);
          nn += v * v;
        }
        for (auto& v : xi) v /= std::sqrt(nn);
        CHECK(op.quadratic_form(xi) >= lmin - 1e-12);
      }
    }
}

TEST_CASE("decomposition examples") {
  const auto p1 = reiflab::decompose(EllipticOperator::polyharmonic(2, 1));
  CHECK(p1.d_part.half_order() == 0);
  REQUIRE(p1.d_part.size() == 1);
  CHECK(p1.d_part.coeff(0, 0) == 1.0);
  CHECK(p1.b_part.coeff(0, 0) == 1.0);  // (1,0),(1,0)
  CHECK(p1.b_part.coeff(1, 1) == 0.0);  // (0,1),(0,1) moves to D

  const auto p2 = reiflab::decompose(EllipticOperator::polyharmonic(2, 2));
  REQUIRE(p2.d_part.size() == 2);
  CHECK(p2.d_part.coeff(0, 0) == 2.0);
  CHECK(p2.d_part.coeff(1, 1) == 1.0);
  CHECK(p2.d_part.coeff(0, 1) == 0.0);
  CHECK(reiflab::reconstruction_residual(EllipticOperator::polyharmonic(2, 2), p2) == 0.0);
}

TEST_CASE("decomposition is exact and keeps ellipticity") {
  std::mt19937_64 rng(5);
  for (int N = 1; N <= 3; ++N)
    for (int m = 1; m <= 3; ++m)
      for (int t = 0; t < 5; ++t) {
        const auto op = random_elliptic(N, m, rng);
        const auto parts = reiflab::decompose(op);
        CHECK(reiflab::reconstruction_residual(op, parts) == 0.0);
        CHECK(reiflab::ellipticity_constant(parts.d_part) >= reiflab::ellipticity_constant(op) - 1e-12);
        // Coefficientwise check of d_{a', b'} = a_{a'+e_N, b'+e_N}.
        const auto eN = reiflab::MultiIndex::unit(N, N - 1);
        for (const auto& a : parts.d_part.indices())
          for (const auto& b : parts.d_part.indices()) CHECK(parts.d_part.coeff(a, b) == op.coeff(a + eN, b + eN));
      }
}

TEST_CASE("recursive decomposition ends at a positive scalar") {
  std::mt19937_64 rng(9);
  for (int m = 1; m <= 4; ++m) {
    auto op = random_elliptic(2, m, rng);
    for (int k = 0; k < m; ++k) op = reiflab::decompose(op).d_part;
    CHECK(op.half_order() == 0);
    REQUIRE(op.size() == 1);
    CHECK(op.coeff(0, 0) > 0.0);
  }
}

TEST_CASE("symbol of the polyharmonic operator is |k|^{2m}") {
  const std::vector<double> k{3.0, 4.0};
  CHECK(reiflab::apply_symbol(EllipticOperator::polyharmonic(2, 1), k) == doctest::Approx(25.0));
  CHECK(reiflab::apply_symbol(EllipticOperator::polyharmonic(2, 2), k) == doctest::Approx(625.0));
  const std::vector<double> zero{0.0, 0.0};
  std::mt19937_64 rng(1);
  CHECK(reiflab::apply_symbol(random_elliptic(2, 2, rng), zero) == 0.0);

  std::normal_distribution<double> g;
  for (int N = 1; N <= 3; ++N)
    for (int m = 1; m <= 4; ++m)
      for (int t = 0; t < 10; ++t) {
        std::vector<double> kk(static_cast<std::size_t>(N));
        for (auto& v : kk) v = g(rng);
        const double expect = norm_pow(kk, m);
        CHECK(std::abs(reiflab::apply_symbol(EllipticOperator::polyharmonic(N, m), kk) - expect) <= 1e-12 * expect);
      }
}

TEST_CASE("json round trip stores the upper triangle") {
  std::mt19937_64 rng(2);
  const auto op = random_elliptic(2, 2, rng);
  const auto doc = reiflab::operator_to_json(op);
  CHECK(doc["entries"].size() <= 6);
  const auto back = reiflab::operator_from_json(doc);
  for (std::size_t i = 0; i < op.size(); ++i)
    for (std::size_t j = 0; j < op.size(); ++j) CHECK(back.coeff(i, j) == op.coeff(i, j));
  CHECK_THROWS_AS(reiflab::operator_from_json(nlohmann::json::parse(R"({"N":2})")), reiflab::InvalidInput);
}
