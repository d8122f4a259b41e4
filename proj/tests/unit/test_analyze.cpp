#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "reiflab/analysis.hpp"
#include "reiflab/errors.hpp"
#include "reiflab/geometry.hpp"

using namespace reiflab;

namespace {

constexpr double kPi = std::numbers::pi;

// Polar Simpson rule on the upper half disk of radius 1.
template <class Fn>
double half_disk_integral(Fn&& fn) {
  const int nr = 400, nt = 400;
  const auto w = [](int i, int n) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double s = 0.0;
  for (int i = 0; i <= nr; ++i) {
    const double rho = static_cast<double>(i) / nr;
    for (int j = 0; j <= nt; ++j) {
      const double th = kPi * j / nt;
      s += w(i, nr) * w(j, nt) * fn(rho * std::cos(th), rho * std::sin(th)) * rho;
    }
  }
  return s * (1.0 / nr / 3.0) * (kPi / nt / 3.0);
}

}  // namespace

TEST_CASE("power-law fit recovers fabricated exponents") {
  std::vector<double> r, e;
  for (int k = 0; k <= 4; ++k) {
    r.push_back(0.8 * std::pow(0.5, k));
    e.push_back(r.back() * r.back());
  }
  const auto fit = fit_power_law(r, e);
  CHECK(std::abs(fit.slope - 2.0) <= 1e-12);
  CHECK(fit.rms <= 1e-12);
  for (double p : {0.5, 1.7, 3.0}) {
    std::vector<double> e2;
    for (double x : r) e2.push_back(3.3 * std::pow(x, p));
    CHECK(std::abs(fit_power_law(r, e2).slope - p) <= 1e-12);
  }
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0}, std::vector<double>{1.0}), InvalidInput);
}

TEST_CASE("flat boundary decay") {
  const auto op = EllipticOperator::polyharmonic(2, 1);
  const auto dom = half_space_ball(1.0, 1.0 / 256);
  const auto u = GridFunction::sample(dom, [](const Point& p) { return p[1]; });
  const auto rep = decay_profile(op, u, Point{}, 0.8, 0.5, 4);
  REQUIRE(rep.valid());
  CHECK(rep.radii.size() == 5);
  CHECK(std::abs(rep.fitted_exponent - 2.0) <= 0.05);
  for (std::size_t k = 1; k < rep.energies.size(); ++k) CHECK(rep.energies[k] <= rep.energies[k - 1]);
}

TEST_CASE("interior decay of a linear function") {
  const auto op = EllipticOperator::polyharmonic(2, 1);
  const auto dom = ball_domain(1.0, 1.0 / 128);
  const auto u = GridFunction::sample(dom, [](const Point& p) { return p[0]; });
  const auto rep = decay_profile(op, u, Point{0.1, 0.05, 0.0}, 0.6, 0.5, 4);
  CHECK(std::abs(rep.fitted_exponent - 2.0) <= 0.05);
}

TEST_CASE("decay flags noise-level rungs and checks the ladder") {
  const auto op = EllipticOperator::polyharmonic(2, 1);
  const auto dom = ball_domain(1.0, 1.0 / 64);
  const auto zero = GridFunction::zeros(dom);
  const auto rep = decay_profile(op, zero, Point{}, 0.5, 0.5, 2);
  CHECK_FALSE(rep.valid());
  CHECK(std::isnan(rep.fitted_exponent));
  const auto u = GridFunction::sample(dom, [](const Point& p) { return p[0]; });
  DecayOptions noisy;
  noisy.noise_floor = 1.0;
  CHECK_FALSE(decay_profile(op, u, Point{}, 0.5, 0.5, 2, noisy).valid());
  CHECK_THROWS_AS(decay_profile(op, u, Point{}, 0.5, 0.5, 5), InvalidInput);
  CHECK_THROWS_AS(decay_profile(op, u, Point{}, 0.5, 1.5, 2), InvalidInput);
}

TEST_CASE("campanato seminorm") {
  const double h = 1.0 / 128;
  const auto dom = ball_domain(1.0, h);
  const auto c = GridFunction::sample(dom, [](const Point&) { return 2.5; });
  const std::vector<double> radii{0.05, 0.1, 0.2};
  const std::vector<Point> centers{Point{}, Point{0.3, 0.1, 0.0}};
  CHECK(campanato_seminorm(c, 2.0, radii, centers) == doctest::Approx(0.0).scale(1.0));

  // Linear v: sum |x_1 - mean|^2 over B(x, r) tends to pi r^4 / 4.
  const auto v = GridFunction::sample(dom, [](const Point& p) { return p[0]; });
  for (double r : {0.1, 0.2, 0.4}) {
    const double at_n = campanato_seminorm(v, 2.0, std::vector<double>{r}, std::vector<Point>{Point{}});
    CHECK(at_n == doctest::Approx(kPi * r * r / 4.0).epsilon(4 * h / r));
    const double at_n2 = campanato_seminorm(v, 4.0, std::vector<double>{r}, std::vector<Point>{Point{}});
    CHECK(at_n2 == doctest::Approx(kPi / 4.0).epsilon(4 * h / r));
  }
  CHECK(campanato_seminorm(v, 2.0, radii, centers) <= kPi * 0.2 * 0.2 / 4.0 * 1.1);

  // A jump across x_1 = 0 blows up at lambda = N + 1 as r shrinks.
  const auto step = GridFunction::sample(dom, [](const Point& p) { return p[0] > 0.0 ? 1.0 : 0.0; });
  double prev = 0.0;
  for (double r : {0.4, 0.2, 0.1, 0.05}) {
    const double s = campanato_seminorm(step, 3.0, std::vector<double>{r}, std::vector<Point>{Point{}});
    CHECK(s > 1.5 * prev);
    prev = s;
  }
  // Balls that miss the mask are skipped.
  CHECK(campanato_seminorm(v, 2.0, std::vector<double>{0.1}, std::vector<Point>{Point{5.0, 5.0, 0.0}}) == 0.0);
}

TEST_CASE("hoelder exponent of a linear function") {
  const auto dom = ball_domain(1.0, 1.0 / 128);
  const auto v = GridFunction::sample(dom, [](const Point& p) { return 2.0 * p[0] - p[1]; });
  HolderOptions opt;
  opt.pair_budget = 50000;
  const auto rep = holder_exponent(v, opt);
  CHECK_FALSE(rep.degenerate);
  CHECK(std::abs(rep.exponent_estimate - 1.0) <= 0.02);
  CHECK(rep.seminorm_estimate == doctest::Approx(std::sqrt(5.0)).epsilon(0.05));
  CHECK(rep.campanato_lambda == doctest::Approx(2.0 + 2.0 * rep.exponent_estimate));
  CHECK(std::isfinite(rep.campanato_seminorm));
}

TEST_CASE("hoelder exponent of the cone profile") {
  const double omega = 1.5 * kPi;
  const auto dom = cone_domain(omega, 1.0, 1.0 / 256);
  const auto v = GridFunction::sample(dom, [&](const Point& p) {
    double th = std::atan2(p[1], p[0]);
    if (th < 0.0) th += 2.0 * kPi;
    return std::pow(std::hypot(p[0], p[1]), kPi / omega) * std::sin(kPi * th / omega);
  });
  HolderOptions opt;
  opt.pair_budget = 60000;
  opt.center = Point{};
  opt.max_sep = 0.25;
  const auto rep = holder_exponent(v, opt);
  CHECK(std::abs(rep.exponent_estimate - 2.0 / 3.0) <= 0.05);
}

TEST_CASE("hoelder exponent flags constants and is seeded") {
  const auto dom = ball_domain(1.0, 1.0 / 64);
  const auto c = GridFunction::sample(dom, [](const Point&) { return 1.0; });
  const auto rep = holder_exponent(c, HolderOptions{});
  CHECK(rep.degenerate);
  CHECK(std::isnan(rep.exponent_estimate));

  const auto v = GridFunction::sample(dom, [](const Point& p) { return std::sqrt(std::abs(p[0])); });
  HolderOptions opt;
  opt.pair_budget = 20000;
  opt.seed = 9;
  const auto a = holder_exponent(v, opt), b = holder_exponent(v, opt);
  CHECK(a.exponent_estimate == b.exponent_estimate);
  CHECK(a.seminorm_estimate == b.seminorm_estimate);
  CHECK(a.exponent_estimate > 0.0);
  CHECK(a.exponent_estimate <= 1.0);
}

TEST_CASE("vertical poincare closed forms") {
  const double h = 1.0 / 128;
  const auto dom = ball_domain(1.0, h, 2);
  const Cube q{Point{0.0, 0.0, 0.0}, 0.25};
  const double r = q.r;

  const auto one = LatticeField::sample(dom, [](const Point&) { return 1.0; });
  const auto a = check_vertical_poincare(one, q, 0.75);
  CHECK(a.norm_v == doctest::Approx(2 * r).epsilon(2 * h / r));
  CHECK(a.norm_upper == doctest::Approx(std::sqrt(2 * r * 0.25 * r)).epsilon(4 * h / r));
  CHECK(a.norm_dn == 0.0);
  CHECK(a.margin > 0.0);

  const auto xn = LatticeField::sample(dom, [](const Point& p) { return p[1]; });
  const double lam = 0.5;
  const auto b = check_vertical_poincare(xn, q, lam);
  CHECK(b.norm_v == doctest::Approx(std::sqrt(2 * r * 2 * r * r * r / 3)).epsilon(4 * h / r));
  CHECK(b.norm_upper == doctest::Approx(std::sqrt(2 * r * (1 - lam * lam * lam) * r * r * r / 3)).epsilon(4 * h / r));
  CHECK(b.norm_dn == doctest::Approx(2 * r).epsilon(2 * h / r));
  CHECK(b.margin == doctest::Approx(4 * b.norm_upper + 3 * r * b.norm_dn - b.norm_v));

  const auto zero = LatticeField::zeros(dom);
  CHECK(check_vertical_poincare(zero, q, 0.5).margin == 0.0);
  CHECK_THROWS_AS(check_vertical_poincare(one, Cube{Point{}, 2.0}, 0.5), InvalidInput);
  CHECK_THROWS_AS(check_vertical_poincare(one, q, 0.9), InvalidInput);
}

TEST_CASE("vertical poincare holds for random smooth functions") {
  const double h = 1.0 / 64;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int dim = 2; dim <= 3; ++dim) {
    const auto dom = ball_domain(1.0, dim == 3 ? 1.0 / 32 : h, dim);
    const double hh = dom->spacing();
    for (int t = 0; t < 20; ++t) {
      double c[6], k[6];
      for (int i = 0; i < 6; ++i) {
        c[i] = U(rng);
        k[i] = 6.0 * U(rng);
      }
      const auto v = LatticeField::sample(dom, [&](const Point& p) {
        return c[0] + c[1] * std::sin(k[0] * p[0] + k[1] * p[1] + k[4] * p[2]) + c[2] * p[dim - 1] * p[0] +
               c[3] * std::cos(k[2] * p[dim - 1] + k[3] * p[0]);
      });
      const Cube q{Point{0.2 * U(rng), 0.2 * U(rng), 0.2 * U(rng)}, 0.2 + 0.1 * U(rng)};
      const double lam = 0.05 + 0.65 * (U(rng) + 1.0) / 2.0;
      const auto res = check_vertical_poincare(v, q, lam);
      CHECK(res.margin >= -5.0 * hh * res.norm_v);
    }
  }
}

TEST_CASE("half-ball poincare ratio") {
  const auto profile = [](double x, double y) { return y > 0.0 ? y * (1 - x * x - y * y) * (1 - x * x - y * y) : 0.0; };
  // |grad v|^2 with q = 1 - x^2 - y^2: v_x = -4xy q, v_y = q^2 - 4y^2 q.
  const auto grad2 = [](double x, double y) {
    const double q = 1 - x * x - y * y;
    const double vx = -4 * x * y * q, vy = q * q - 4 * y * y * q;
    return vx * vx + vy * vy;
  };
  const double l2 = half_disk_integral([&](double x, double y) { return profile(x, y) * profile(x, y); });
  const double g2 = half_disk_integral(grad2);
  const double oracle = std::sqrt((l2 + g2) / g2);

  for (double h : {1.0 / 64, 1.0 / 128}) {
    const auto dom = ball_domain(1.0, h);
    const auto v = LatticeField::sample(dom, [&](const Point& p) {
      return std::hypot(p[0], p[1]) < 1.0 ? profile(p[0], p[1]) : 0.0;
    });
    const auto rep = check_poincare_halfball(v, 1);
    CHECK_FALSE(rep.skipped);
    CHECK(rep.ratio == doctest::Approx(oracle).epsilon(10 * h));
  }
  const auto dom = ball_domain(1.0, 1.0 / 32);
  CHECK(check_poincare_halfball(LatticeField::zeros(dom), 1).skipped);
  const auto bad = LatticeField::sample(dom, [](const Point& p) { return p[0]; });
  CHECK_THROWS_AS(check_poincare_halfball(bad, 1), InvalidInput);
}

TEST_CASE("half-ball poincare constant is stable under refinement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<std::array<double, 6>> family(12);
  for (auto& c : family)
    for (auto& x : c) x = U(rng);
  for (int m = 1; m <= 2; ++m) {
    double worst[2] = {0.0, 0.0};
    int level = 0;
    for (double h : {1.0 / 48, 1.0 / 96}) {
      const auto dom = ball_domain(1.0, h);
      for (const auto& c : family) {
        const auto v = LatticeField::sample(dom, [&](const Point& p) {
          if (p[1] <= 0.0) return 0.0;
          const double poly = c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[0] * p[0] + c[4] * p[0] * p[1] + c[5] * p[1] * p[1];
          const double cut = std::pow(std::max(0.0, 1.0 - p[0] * p[0] - p[1] * p[1]), m + 1);
          return std::pow(p[1], m + 1) * cut * poly;
        });
        worst[level] = std::max(worst[level], check_poincare_halfball(v, m).ratio);
      }
      ++level;
    }
    CHECK(worst[1] == doctest::Approx(worst[0]).epsilon(0.1));
  }
}

TEST_CASE("difference bound") {
  const double h = 1.0 / 128;
  const auto dom = ball_domain(1.0, h);
  const MultiIndex e1({1, 0}), e11({2, 0});

  const auto s = LatticeField::sample(dom, [](const Point& p) { return std::sin(p[0]); });
  const auto cs = LatticeField::sample(dom, [](const Point& p) { return std::cos(p[0]); });
  const auto a = check_difference_bound(s, cs, e1, 1);
  CHECK(a.margin >= 0.0);

  // Affine: D_eps is exact, so the gap is the measure difference of the two sets.
  const auto lin = LatticeField::sample(dom, [](const Point& p) { return 3.0 * p[0] - p[1]; });
  const auto three = LatticeField::sample(dom, [](const Point&) { return 3.0; });
  const auto b = check_difference_bound(lin, three, e1, 1);
  std::size_t n_omega = 0;
  for (std::size_t i = 0; i < dom->node_count(); ++i) {
    if (!dom->inside(i)) continue;
    const Node n = dom->node(i);
    bool ok = true;
    for (std::int64_t di = -1; di <= 1 && ok; ++di)
      for (std::int64_t dj = -1; dj <= 1 && ok; ++dj) ok = dom->inside(dom->index(Node{n[0] + di, n[1] + dj, 0}));
    if (ok) ++n_omega;
  }
  CHECK(b.difference_norm == doctest::Approx(3.0 * h * std::sqrt(static_cast<double>(n_omega))).epsilon(1e-12));
  CHECK(b.exact_norm == doctest::Approx(3.0 * h * std::sqrt(static_cast<double>(dom->inside_count()))).epsilon(1e-12));

  const auto sq = LatticeField::sample(dom, [](const Point& p) { return p[0] * p[0]; });
  const auto two = LatticeField::sample(dom, [](const Point&) { return 2.0; });
  CHECK(check_difference_bound(sq, two, e11, 2).margin >= -10.0 * h);
  CHECK_THROWS_AS(check_difference_bound(sq, two, e11, 1), InvalidInput);
}

TEST_CASE("admissible ladder ratio") {
  CHECK(admissible_ladder_ratio(EllipticOperator::polyharmonic(2, 1), 1.0, 0.5) == doctest::Approx(1.0 / 16.0));
  CHECK(admissible_ladder_ratio(EllipticOperator::polyharmonic(2, 2), 1.0, 0.0) == doctest::Approx(1.0 / 8.0));
  CHECK_THROWS_AS(admissible_ladder_ratio(EllipticOperator::polyharmonic(2, 1), 0.5, 0.5), InvalidInput);
}
