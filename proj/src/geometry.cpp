#include "reiflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "reiflab/errors.hpp"
#include "reiflab/parallel.hpp"

namespace reiflab {
namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t cells(double length, double h) { return static_cast<std::int64_t>(std::ceil(length / h - 1e-9)); }

}  // namespace

DomainPtr truncated_ball(double R, double lambda, double h, int dim, int margin) {
  if (!(R > 0.0) || !(h > 0.0)) throw InvalidInput("truncated_ball needs R > 0 and h > 0");
  if (h > R / 4.0) throw InvalidInput("truncated_ball: h is too coarse for R");
  if (lambda < -1.0 || lambda >= 1.0) throw InvalidInput("truncated_ball: lambda must lie in [-1, 1)");
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("truncated_ball: dimension must be 1, 2 or 3");
  const std::int64_t n = cells(R, h);
  Node lo{}, shape{1, 1, 1};
  for (int d = 0; d < dim; ++d) {
    lo[d] = -n - margin;
    shape[d] = 2 * (n + margin) + 1;
  }
  const int last = dim - 1;
  lo[last] = static_cast<std::int64_t>(std::floor(lambda * R / h)) - margin;
  shape[last] = n + margin - lo[last] + 1;
  const double floor_level = lambda * R + 1e-9 * h;
  auto mask = mask_from(dim, h, lo, shape, [&](const Point& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    return r2 < R * R && p[static_cast<std::size_t>(last)] > floor_level;
  });
  return std::make_shared<const GridDomain>(
      dim, h, lo, shape, std::move(mask), "truncated_ball",
      nlohmann::json{{"generator", "truncated_ball"}, {"R", R}, {"lambda", lambda}, {"h", h}, {"N", dim}});
}

DomainPtr half_space_ball(double R, double h, int dim, int margin) {
  if (h > R / 16.0) throw InvalidInput("half_space_ball needs h <= R/16");
  return truncated_ball(R, 0.0, h, dim, margin);
}

DomainPtr ball_domain(double R, double h, int dim, int margin) { return truncated_ball(R, -1.0, h, dim, margin); }

DomainPtr interval_domain(double a, double b, double h, int margin) {
  if (!(b > a) || !(h > 0.0) || h > (b - a) / 2.0) throw InvalidInput("interval_domain needs a < b and h <= (b-a)/2");
  const auto first = static_cast<std::int64_t>(std::floor(a / h)) - margin;
  const auto last = static_cast<std::int64_t>(std::ceil(b / h)) + margin;
  const Node lo{first, 0, 0};
  const Node shape{last - first + 1, 1, 1};
  const double tol = 1e-9 * h;
  auto mask = mask_from(1, h, lo, shape, [&](const Point& p) { return p[0] > a + tol && p[0] < b - tol; });
  return std::make_shared<const GridDomain>(
      1, h, lo, shape, std::move(mask), "interval",
      nlohmann::json{{"generator", "interval"}, {"a", a}, {"b", b}, {"h", h}, {"N", 1}});
}

DomainPtr cone_domain(double omega, double R, double h, int margin) {
  if (!(omega > 0.0) || !(omega < 2.0 * kPi)) throw InvalidInput("cone_domain needs 0 < omega < 2 pi");
  if (!(R > 0.0) || !(h > 0.0) || h > R / 16.0) throw InvalidInput("cone_domain needs h <= R/16");
  const std::int64_t n = cells(R, h);
  const Node lo{-n - margin, -n - margin, 0};
  const Node shape{2 * (n + margin) + 1, 2 * (n + margin) + 1, 1};
  constexpr double kAngleTol = 1e-12;
  auto mask = mask_from(2, h, lo, shape, [&](const Point& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    if (r2 == 0.0 || r2 >= R * R) return false;
    double theta = std::atan2(p[1], p[0]);
    if (theta < 0.0) theta += 2.0 * kPi;
    if (theta > 2.0 * kPi - kAngleTol) theta = 0.0;
    return theta > kAngleTol && theta < omega - kAngleTol;
  });
  return std::make_shared<const GridDomain>(
      2, h, lo, shape, std::move(mask), "cone",
      nlohmann::json{{"generator", "cone"}, {"omega", omega}, {"R", R}, {"h", h}, {"N", 2}});
}

std::vector<Point> koch_curve(double delta, int depth, double R, int sides) {
  if (sides < 3) throw InvalidInput("koch_curve needs at least 3 sides");
  if (depth < 0) throw InvalidInput("koch_curve needs depth >= 0");
  if (delta < 0.0 || delta >= 0.4) throw InvalidInput("koch_curve needs delta in [0, 0.4)");
  std::vector<Point> pts;
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * kPi * k / sides;
    pts.push_back(Point{R * std::cos(t), R * std::sin(t), 0.0});
  }
  for (int level = 0; level < depth; ++level) {
    std::vector<Point> next;
    next.reserve(pts.size() * 4);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point& p = pts[i];
      const Point& q = pts[(i + 1) % pts.size()];
      const double tx = q[0] - p[0], ty = q[1] - p[1];
      const double len = std::hypot(tx, ty);
      // Outward normal of a counter-clockwise edge.
      const double nx = ty / len, ny = -tx / len;
      next.push_back(p);
      next.push_back(Point{p[0] + tx / 3.0, p[1] + ty / 3.0, 0.0});
      next.push_back(Point{p[0] + tx / 2.0 + delta * len * nx, p[1] + ty / 2.0 + delta * len * ny, 0.0});
      next.push_back(Point{p[0] + 2.0 * tx / 3.0, p[1] + 2.0 * ty / 3.0, 0.0});
    }
    pts = std::move(next);
  }
  return pts;
}

namespace {

// Necks narrower than h can cut a few nodes off the main region; drop them.
std::size_t keep_largest_component(std::vector<std::uint8_t>& mask, const Node& shape) {
  const std::int64_t nx = shape[0], ny = shape[1];
  std::vector<std::int32_t> label(mask.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (!mask[s] || label[s] >= 0) continue;
    const auto id = static_cast<std::int32_t>(sizes.size());
    std::size_t count = 0;
    stack.push_back(s);
    label[s] = id;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++count;
      const std::int64_t i = static_cast<std::int64_t>(c) / ny, j = static_cast<std::int64_t>(c) % ny;
      const std::int64_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
        const auto k = static_cast<std::size_t>(q[0] * ny + q[1]);
        if (mask[k] && label[k] < 0) {
          label[k] = id;
          stack.push_back(k);
        }
      }
    }
    sizes.push_back(count);
  }
  if (sizes.size() <= 1) return 0;
  const auto best = static_cast<std::int32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::size_t dropped = 0;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k] && label[k] != best) {
      mask[k] = 0;
      ++dropped;
    }
  return dropped;
}

}  // namespace

DomainPtr koch_domain(double delta, int depth, double R, double h, int sides, int margin) {
  if (!(R > 0.0) || !(h > 0.0)) throw InvalidInput("koch_domain needs R > 0 and h > 0");
  if (!(delta >= 0.0 && delta < 0.4)) throw InvalidInput("koch_domain needs delta in [0, 0.4)");
  const double base_edge = 2.0 * R * std::sin(kPi / sides);
  const double finest = base_edge / std::pow(3.0, depth);
  if (finest < 4.0 * h)
    throw InvalidInput("koch_domain: finest generation (" + std::to_string(finest) + ") spans fewer than 4 nodes at h=" +
                       std::to_string(h) + "; lower depth or refine h");
  const auto curve = koch_curve(delta, depth, R, sides);

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& p : curve) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const Node lo{static_cast<std::int64_t>(std::floor(xmin / h)) - margin,
                static_cast<std::int64_t>(std::floor(ymin / h)) - margin, 0};
  const Node hi{static_cast<std::int64_t>(std::ceil(xmax / h)) + margin,
                static_cast<std::int64_t>(std::ceil(ymax / h)) + margin, 0};
  const Node shape{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, 1};

  // Even-odd scanline fill.
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(shape[0] * shape[1]), 0);
  std::vector<double> crossings;
  for (std::int64_t j = 0; j < shape[1]; ++j) {
    const double y = static_cast<double>(lo[1] + j) * h;
    crossings.clear();
    for (std::size_t e = 0; e < curve.size(); ++e) {
      const Point& a = curve[e];
      const Point& b = curve[(e + 1) % curve.size()];
      if ((a[1] > y) != (b[1] > y)) crossings.push_back(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
      for (std::int64_t i = 0; i < shape[0]; ++i) {
        const double x = static_cast<double>(lo[0] + i) * h;
        if (x > crossings[c] && x < crossings[c + 1]) mask[static_cast<std::size_t>(i * shape[1] + j)] = 1;
      }
    }
  }
  const std::size_t dropped = keep_largest_component(mask, shape);
  return std::make_shared<const GridDomain>(2, h, lo, shape, std::move(mask), "koch",
                                            nlohmann::json{{"generator", "koch"},
                                                           {"dropped_nodes", dropped},
                                                           {"delta", delta},
                                                           {"depth", depth},
                                                           {"R", R},
                                                           {"h", h},
                                                           {"sides", sides},
                                                           {"N", 2}});
}

std::vector<std::uint8_t> boundary_flags(const GridDomain& dom) {
  std::vector<std::uint8_t> flags(dom.node_count(), 0);
  for (std::size_t i : boundary_points(dom)) flags[i] = 1;
  return flags;
}

namespace {

std::vector<Point> scan_directions(int dim) {
  std::vector<Point> dirs;
  if (dim == 1) {
    dirs.push_back(Point{1.0, 0.0, 0.0});
  } else if (dim == 2) {
    constexpr int kCount = 720;
    for (int k = 0; k < kCount; ++k) {
      const double t = kPi * k / kCount;
      dirs.push_back(Point{std::cos(t), std::sin(t), 0.0});
    }
  } else {
    constexpr int kCount = 1000;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < kCount; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / kCount;
      const double rho = std::sqrt(1.0 - z * z);
      dirs.push_back(Point{rho * std::cos(golden * k), rho * std::sin(golden * k), z});
    }
  }
  return dirs;
}

}  // namespace

FlatnessSample flatness_at(const GridDomain& dom, const std::vector<std::uint8_t>& flags, const Point& x, double r) {
  static const std::vector<Point> dirs2 = scan_directions(2);
  static const std::vector<Point> dirs3 = scan_directions(3);
  static const std::vector<Point> dirs1 = scan_directions(1);
  const auto& dirs = dom.dim() == 3 ? dirs3 : dom.dim() == 2 ? dirs2 : dirs1;

  std::vector<Point> rel;
  dom.for_each_in_ball(x, r, [&](std::size_t i) {
    if (!flags[i]) return;
    const Point p = dom.position(i);
    rel.push_back(Point{p[0] - x[0], p[1] - x[1], p[2] - x[2]});
  });
  if (rel.empty()) throw InvalidInput("flatness: ball contains no boundary node");

  FlatnessSample best;
  best.x = x;
  best.r = r;
  best.eps = std::numeric_limits<double>::infinity();
  for (const auto& n : dirs) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& q : rel) {
      const double s = n[0] * q[0] + n[1] * q[1] + n[2] * q[2];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const double eps = (hi - lo) / (2.0 * r);
    if (eps < best.eps) {
      best.eps = eps;
      best.normal = n;
    }
  }
  best.eps = std::clamp(best.eps, 0.0, 1.0);
  return best;
}

FlatnessReport measure_flatness(const GridDomain& dom, const std::vector<double>& radii, std::size_t n_centers,
                                std::uint64_t seed) {
  const double h = dom.spacing();
  const double rmax = dom.diameter() / 2.0;
  if (radii.empty()) throw InvalidInput("measure_flatness needs at least one radius");
  for (double r : radii)
    if (r < 4.0 * h - 1e-12 || r > rmax + 1e-12)
      throw InvalidInput("measure_flatness: radius " + std::to_string(r) + " outside [4h, diameter/2]");

  const auto flags = boundary_flags(dom);
  std::vector<std::size_t> boundary = boundary_points(dom);
  if (n_centers < boundary.size()) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_centers; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (boundary.size() - i));
      std::swap(boundary[i], boundary[j]);
    }
    boundary.resize(n_centers);
    std::sort(boundary.begin(), boundary.end());
  }

  FlatnessReport report;
  report.r0 = *std::max_element(radii.begin(), radii.end());
  report.samples.resize(boundary.size() * radii.size());
  parallel_for(report.samples.size(), [&](std::size_t t) {
    const std::size_t c = t / radii.size();
    report.samples[t] = flatness_at(dom, flags, dom.position(boundary[c]), radii[t % radii.size()]);
  });
  for (const auto& s : report.samples) report.eps_max = std::max(report.eps_max, s.eps);
  return report;
}

}  // namespace reiflab
