#include "reiflab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "reiflab/errors.hpp"
#include "reiflab/parallel.hpp"

namespace reiflab {
namespace {

double cell_volume(const GridDomain& dom) { return std::pow(dom.spacing(), dom.dim()); }

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

PowerFit fit_power_law(std::span<const double> radii, std::span<const double> energies, double floor) {
  if (radii.size() != energies.size()) throw InvalidInput("fit_power_law: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(energies[k] > floor) || !(radii[k] > 0.0)) continue;
    xs.push_back(std::log(radii[k]));
    ys.push_back(std::log(energies[k]));
  }
  if (xs.size() < 2) throw InvalidInput("fit_power_law: fewer than two usable points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InvalidInput("fit_power_law: radii are all equal");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double d = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / n);
  fit.used = xs.size();
  return fit;
}

bool DecayReport::valid() const { return valid_rungs >= 3 && std::isfinite(fitted_exponent); }

DecayReport decay_profile(const EllipticOperator& op, const LatticeField& u, const Point& center, double R,
                          double a, int k_max, const DecayOptions& options) {
  const auto& dom = u.domain();
  if (!(a > 0.0 && a < 1.0)) throw InvalidInput("decay_profile: ladder ratio must lie in (0, 1)");
  if (k_max < 1) throw InvalidInput("decay_profile: k_max must be at least 1");
  if (!(R > 0.0)) throw InvalidInput("decay_profile: R must be positive");
  if (R * std::pow(a, k_max) < 4.0 * dom.spacing() * (1.0 - 1e-12))
    throw InvalidInput("decay_profile: smallest rung R a^k_max = " + std::to_string(R * std::pow(a, k_max)) +
                       " is below 4h = " + std::to_string(4.0 * dom.spacing()));
  DecayReport rep;
  rep.center = center;
  rep.R = R;
  rep.a = a;
  for (int k = 0; k <= k_max; ++k) {
    const double r = R * std::pow(a, k);
    rep.radii.push_back(r);
    rep.energies.push_back(energy_local(op, u, center, r, options.metric));
  }
  const double floor = 10.0 * options.noise_floor;
  for (double e : rep.energies)
    if (e > floor) ++rep.valid_rungs;
  if (rep.valid_rungs >= 3) {
    const auto fit = fit_power_law(rep.radii, rep.energies, floor);
    rep.fitted_exponent = fit.slope;
    rep.fit_residual = fit.rms;
  } else {
    rep.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    rep.fit_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

double campanato_seminorm(const LatticeField& v, double lambda, std::span<const double> radii,
                          std::span<const Point> centers) {
  const auto& dom = v.domain();
  for (double r : radii)
    if (!(r > 0.0)) throw InvalidInput("campanato_seminorm: radii must be positive");
  const double vol = cell_volume(dom);
  std::vector<double> best(centers.size(), 0.0);
  parallel_for(centers.size(), [&](std::size_t c) {
    for (double r : radii) {
      double sum = 0.0;
      std::size_t count = 0;
      dom.for_each_in_ball(centers[c], r, [&](std::size_t i) {
        if (!dom.inside(i)) return;
        sum += v[i];
        ++count;
      });
      if (count == 0) continue;
      const double mean = sum / static_cast<double>(count);
      double dev = 0.0;
      dom.for_each_in_ball(centers[c], r, [&](std::size_t i) {
        if (dom.inside(i)) dev += (v[i] - mean) * (v[i] - mean);
      });
      best[c] = std::max(best[c], std::pow(r, -lambda) * dev * vol);
    }
  });
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

HolderReport holder_exponent(const LatticeField& v, const HolderOptions& opt) {
  const auto& dom = v.domain();
  const int N = dom.dim();
  const double h = dom.spacing();
  if (opt.bins < 2) throw InvalidInput("holder_exponent: need at least two bins");
  if (!(opt.quantile > 0.0 && opt.quantile <= 1.0)) throw InvalidInput("holder_exponent: quantile must lie in (0, 1]");
  if (opt.pair_budget < static_cast<std::size_t>(opt.bins))
    throw InvalidInput("holder_exponent: pair budget smaller than the number of bins");

  std::vector<std::size_t> inside;
  inside.reserve(dom.inside_count());
  for (std::size_t i = 0; i < dom.node_count(); ++i)
    if (dom.inside(i)) inside.push_back(i);

  HolderReport rep;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (auto i : inside) {
    vmin = std::min(vmin, v[i]);
    vmax = std::max(vmax, v[i]);
  }
  const auto mark_degenerate = [&] {
    rep.degenerate = true;
    rep.exponent_estimate = std::numeric_limits<double>::quiet_NaN();
    rep.seminorm_estimate = std::numeric_limits<double>::quiet_NaN();
    return rep;
  };
  if (inside.size() < 2 || !(vmax > vmin)) return mark_degenerate();

  double reach = dom.diameter() / 2.0;
  if (opt.center) {
    double far = 0.0;
    for (auto i : inside) far = std::max(far, distance(dom.position(i), *opt.center, N));
    reach = far / 2.0;
  }
  const double lo = opt.min_sep > 0.0 ? opt.min_sep : 2.0 * h;
  const double hi = opt.max_sep > 0.0 ? opt.max_sep : reach;
  if (!(hi > lo)) throw InvalidInput("holder_exponent: max_sep must exceed min_sep");

  const auto nbins = static_cast<std::size_t>(opt.bins);
  std::vector<double> edges(nbins + 1);
  for (std::size_t b = 0; b <= nbins; ++b) edges[b] = lo * std::pow(hi / lo, static_cast<double>(b) / opt.bins);
  const std::size_t per_bin = opt.pair_budget / nbins;

  struct Sample {
    double dist, diff;
  };
  std::vector<std::vector<Sample>> samples(nbins);
  parallel_for(nbins, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    const double d_lo = edges[b], d_hi = edges[b + 1];
    std::vector<std::size_t> local;
    const std::vector<std::size_t>* pool = &inside;
    if (opt.center) {
      dom.for_each_in_ball(*opt.center, 2.0 * d_hi, [&](std::size_t i) {
        if (dom.inside(i)) local.push_back(i);
      });
      pool = &local;
    }
    if (pool->empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, pool->size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    auto& out = samples[b];
    const std::size_t max_attempts = 50 * per_bin;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < per_bin; ++attempt) {
      const std::size_t xi = (*pool)[pick(rng)];
      const double d = d_lo * std::pow(d_hi / d_lo, unit(rng));
      Point dir{};
      double norm = 0.0;
      do {
        norm = 0.0;
        for (int i = 0; i < N; ++i) {
          dir[i] = gauss(rng);
          norm += dir[i] * dir[i];
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      Node target = dom.node(xi);
      double dist2 = 0.0;
      for (int i = 0; i < N; ++i) {
        const auto step = static_cast<std::int64_t>(std::llround(d * dir[i] / norm / h));
        target[i] += step;
        dist2 += static_cast<double>(step * step);
      }
      const double dist = std::sqrt(dist2) * h;
      if (dist < d_lo || dist >= d_hi || !dom.in_box(target)) continue;
      const std::size_t yi = dom.index(target);
      if (!dom.inside(yi)) continue;
      out.push_back({dist, std::abs(v[yi] - v[xi])});
    }
  });

  std::vector<double> fit_d, fit_q;
  for (std::size_t b = 0; b < nbins; ++b) {
    auto& s = samples[b];
    if (s.size() < 8) continue;
    std::vector<double> diffs;
    double log_d = 0.0;
    for (const auto& p : s) {
      diffs.push_back(p.diff);
      log_d += std::log(p.dist);
    }
    const auto k = std::min(diffs.size() - 1, static_cast<std::size_t>(opt.quantile * static_cast<double>(diffs.size())));
    std::nth_element(diffs.begin(), diffs.begin() + static_cast<std::ptrdiff_t>(k), diffs.end());
    HolderBin bin{std::exp(log_d / static_cast<double>(s.size())), diffs[k], s.size()};
    rep.bins.push_back(bin);
    if (bin.quantile > 0.0) {
      fit_d.push_back(bin.distance);
      fit_q.push_back(bin.quantile);
    }
  }
  if (fit_d.size() < 2) return mark_degenerate();
  const auto fit = fit_power_law(fit_d, fit_q);
  rep.raw_slope = fit.slope;
  rep.envelope_constant = std::exp(fit.intercept);
  if (!(fit.slope > 0.0)) return mark_degenerate();
  const double alpha = std::min(fit.slope, 1.0);
  rep.exponent_estimate = alpha;

  double sup = 0.0;
  for (const auto& s : samples)
    for (const auto& p : s) sup = std::max(sup, p.diff / std::pow(p.dist, alpha));
  rep.seminorm_estimate = sup;

  // Campanato check on doubling radii from min_sep, centred on a seeded
  // subset of the sampling pool.
  rep.campanato_lambda = N + 2.0 * alpha;
  std::vector<double> radii;
  for (double r = lo; r <= hi * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
  std::vector<std::size_t> pool;
  if (opt.center) {
    dom.for_each_in_ball(*opt.center, 2.0 * hi, [&](std::size_t i) {
      if (dom.inside(i)) pool.push_back(i);
    });
  } else {
    pool = inside;
  }
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t n_centers = std::min<std::size_t>(64, pool.size());
  for (std::size_t k = 0; k < n_centers; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  std::vector<Point> centers;
  for (std::size_t k = 0; k < n_centers; ++k) centers.push_back(dom.position(pool[k]));
  if (opt.center) centers.push_back(*opt.center);
  rep.campanato_seminorm = campanato_seminorm(v, rep.campanato_lambda, radii, centers);
  return rep;
}

VerticalPoincare check_vertical_poincare(const LatticeField& v, const Cube& cube, double lambda) {
  const auto& dom = v.domain();
  const int N = dom.dim();
  const double h = dom.spacing();
  if (!(lambda > 0.0 && lambda <= 0.75)) throw InvalidInput("check_vertical_poincare: lambda must lie in (0, 3/4]");
  if (!(cube.r > 0.0)) throw InvalidInput("check_vertical_poincare: cube radius must be positive");
  const double tol = 1e-9 * h;
  Node first{}, last{};
  for (int d = 0; d < N; ++d) {
    first[d] = static_cast<std::int64_t>(std::ceil((cube.center[d] - cube.r - tol) / h));
    last[d] = static_cast<std::int64_t>(std::floor((cube.center[d] + cube.r + tol) / h));
  }
  Node top = last;
  top[N - 1] += 1;
  if (!dom.in_box(first) || !dom.in_box(top)) throw InvalidInput("check_vertical_poincare: cube exceeds the lattice");

  double sv = 0.0, su = 0.0, sd = 0.0;
  Node n{};
  const auto visit = [&] {
    const std::size_t i = dom.index(n);
    Node up = n;
    up[N - 1] += 1;
    const double val = v[i];
    const double dn = (v[dom.index(up)] - val) / h;
    sv += val * val;
    sd += dn * dn;
    if (n[N - 1] * h - cube.center[N - 1] > lambda * cube.r) su += val * val;
  };
  for (n[0] = first[0]; n[0] <= last[0]; ++n[0])
    for (n[1] = N > 1 ? first[1] : 0; n[1] <= (N > 1 ? last[1] : 0); ++n[1])
      for (n[2] = N > 2 ? first[2] : 0; n[2] <= (N > 2 ? last[2] : 0); ++n[2]) visit();
  const double vol = cell_volume(dom);
  VerticalPoincare out;
  out.norm_v = std::sqrt(sv * vol);
  out.norm_upper = std::sqrt(su * vol);
  out.norm_dn = std::sqrt(sd * vol);
  out.margin = 4.0 * out.norm_upper + 3.0 * cube.r * out.norm_dn - out.norm_v;
  return out;
}

HalfBallPoincare check_poincare_halfball(const LatticeField& v, int m, double radius) {
  const auto& dom = v.domain();
  const int N = dom.dim();
  if (m < 1) throw InvalidInput("check_poincare_halfball: m must be at least 1");
  std::vector<std::size_t> ball;
  dom.for_each_in_ball(Point{}, radius, [&](std::size_t i) { ball.push_back(i); });
  if (ball.empty()) throw InvalidInput("check_poincare_halfball: ball contains no lattice node");
  double vmax = 0.0;
  for (auto i : ball) vmax = std::max(vmax, std::abs(v[i]));
  HalfBallPoincare out;
  if (vmax == 0.0) {
    out.skipped = true;
    return out;
  }
  for (auto i : ball)
    if (dom.position(i)[N - 1] < 0.0 && std::abs(v[i]) > 1e-12 * vmax)
      throw InvalidInput("check_poincare_halfball: v does not vanish on the lower half ball");

  double total = 0.0, top = 0.0;
  for (int k = 0; k <= m; ++k) {
    double level = 0.0;
    for (const auto& alpha : enumerate(N, k)) {
      const auto st = difference_stencil(alpha);
      for (auto i : ball) {
        const double d = difference_at(v, dom.node(i), st, k);
        level += d * d;
      }
    }
    total += level;
    if (k == m) top = level;
  }
  const double vol = cell_volume(dom);
  out.hm_norm = std::sqrt(total * vol);
  out.grad_norm = std::sqrt(top * vol);
  if (out.grad_norm == 0.0)
    throw InvalidInput("check_poincare_halfball: grad^m v vanishes on the ball while v does not");
  out.ratio = out.hm_norm / out.grad_norm;
  return out;
}

DifferenceBound check_difference_bound(const LatticeField& u, const LatticeField& exact_derivative,
                                       const MultiIndex& alpha, int margin_nodes, int steps) {
  const auto& dom = u.domain();
  const int N = dom.dim();
  if (exact_derivative.size() != u.size()) throw InvalidInput("check_difference_bound: field size mismatch");
  if (margin_nodes < alpha.order() * std::abs(steps))
    throw InvalidInput("check_difference_bound: margin_nodes must be at least |alpha| * |steps|");

  // omega: separable erosion of the mask by an l-infinity box of margin_nodes.
  std::vector<std::uint8_t> keep(dom.mask());
  for (int axis = 0; axis < N; ++axis) {
    std::vector<std::uint8_t> next(keep.size(), 0);
    const std::int64_t stride = dom.stride(axis);
    const std::int64_t extent = dom.shape()[axis];
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (!keep[i]) continue;
      const std::int64_t pos = dom.node(i)[axis] - dom.lo()[axis];
      bool ok = pos - margin_nodes >= 0 && pos + margin_nodes < extent;
      for (std::int64_t s = -margin_nodes; ok && s <= margin_nodes; ++s)
        ok = keep[static_cast<std::size_t>(static_cast<std::int64_t>(i) + s * stride)] != 0;
      next[i] = ok ? 1 : 0;
    }
    keep.swap(next);
  }

  const auto diff = iterated_difference(u, alpha, steps);
  double se = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (dom.inside(i)) se += exact_derivative[i] * exact_derivative[i];
    if (keep[i]) sd += diff[i] * diff[i];
  }
  const double vol = cell_volume(dom);
  DifferenceBound out;
  out.exact_norm = std::sqrt(se * vol);
  out.difference_norm = std::sqrt(sd * vol);
  out.margin = out.exact_norm - out.difference_norm;
  return out;
}

double admissible_ladder_ratio(const EllipticOperator& op, double eta, double b) {
  if (!(eta > b)) throw InvalidInput("admissible_ladder_ratio: requires eta > b");
  const double lambda = ellipticity_constant(op);
  const double c_a = 1.0 / lambda;
  return std::pow(1.0 / (4.0 * c_a * op.max_abs()), 1.0 / (eta - b));
}

}  // namespace reiflab
