#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "reiflab/grid_domain.hpp"

namespace reiflab {

/// Number of false node layers generators leave around the domain; enough
/// for operators up to half-order 3.
inline constexpr int kDefaultMargin = 3;

/// Truncated ball B^lambda(0,R) = B(0,R) ∩ {x_N > lambda R}. lambda = -1 is
/// the full ball, lambda = 0 the upper half-ball.
DomainPtr truncated_ball(double R, double lambda, double h, int dim = 2, int margin = kDefaultMargin);

/// Upper half-ball {|x| < R, x_N > 0}. Requires h <= R/16.
DomainPtr half_space_ball(double R, double h, int dim = 2, int margin = kDefaultMargin);

/// Full ball {|x| < R}.
DomainPtr ball_domain(double R, double h, int dim = 2, int margin = kDefaultMargin);

/// Open interval (a, b) in one dimension.
DomainPtr interval_domain(double a, double b, double h, int margin = kDefaultMargin);

/// Planar sector {0 < theta < omega, 0 < |x| < R}, theta in [0, 2 pi).
DomainPtr cone_domain(double omega, double R, double h, int margin = kDefaultMargin);

/// Closed polygon with Koch-type bumps. The base is a regular polygon with
/// `sides` vertices on the circle of radius R. Every edge is replaced by
/// four edges: the outer thirds stay, the middle third becomes a tent whose
/// apex sits delta * (edge length) outside the edge. Applied `depth` times.
/// Requires the nominal finest edge, base_edge / 3^depth, to span >= 4h.
DomainPtr koch_domain(double delta, int depth, double R, double h, int sides = 6,
                      int margin = kDefaultMargin);

/// Vertex list of the curve used by koch_domain (counter-clockwise).
std::vector<Point> koch_curve(double delta, int depth, double R, int sides);

/// Mask from an arbitrary predicate on node positions.
template <class Pred>
std::vector<std::uint8_t> mask_from(int dim, double h, const Node& lo, const Node& shape, Pred&& pred);

struct FlatnessSample {
  Point x{};
  double r = 0.0;
  Point normal{};
  double eps = 0.0;
};

struct FlatnessReport {
  std::vector<FlatnessSample> samples;
  double eps_max = 0.0;
  double r0 = 0.0;
};

/// Scale-invariant flatness of the discrete boundary inside B(x, r):
/// min over scanned unit normals n of (max - min of n·(y - x)) / (2r) over
/// boundary nodes y in the ball. The best plane is parallel to the minimising
/// normal and centred in the slab. 2D scans 720 directions over [0, pi);
/// 3D uses a 1000-point Fibonacci sphere. Throws InvalidInput if the ball
/// holds no boundary node.
FlatnessSample flatness_at(const GridDomain& dom, const std::vector<std::uint8_t>& boundary_flags,
                           const Point& x, double r);

/// 1 on the nodes returned by boundary_points(), 0 elsewhere.
std::vector<std::uint8_t> boundary_flags(const GridDomain& dom);

/// Samples n_centers boundary nodes (seeded, without replacement when
/// possible) and evaluates flatness_at for every radius.
FlatnessReport measure_flatness(const GridDomain& dom, const std::vector<double>& radii,
                                std::size_t n_centers, std::uint64_t seed = 1);

template <class Pred>
std::vector<std::uint8_t> mask_from(int dim, double h, const Node& lo, const Node& shape, Pred&& pred) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(shape[0] * shape[1] * shape[2]), 0);
  std::size_t idx = 0;
  for (std::int64_t i = 0; i < shape[0]; ++i)
    for (std::int64_t j = 0; j < shape[1]; ++j)
      for (std::int64_t k = 0; k < shape[2]; ++k, ++idx) {
        Point p{};
        p[0] = (lo[0] + i) * h;
        if (dim > 1) p[1] = (lo[1] + j) * h;
        if (dim > 2) p[2] = (lo[2] + k) * h;
        mask[idx] = pred(p) ? 1 : 0;
      }
  return mask;
}

}  // namespace reiflab
