#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace reiflab {

inline constexpr int kMaxDim = 3;

/// Integer lattice coordinates; entries past dim() are zero.
using Node = std::array<std::int64_t, kMaxDim>;
/// Physical coordinates; entries past dim() are zero.
using Point = std::array<double, kMaxDim>;

/// Uniform lattice x = h * i over a box of integer node ranges, with a mask
/// marking the nodes that belong to the open set. Nodes are stored row-major
/// with axis 0 slowest.
///
/// Invariants checked on construction: the mask has at least one true node,
/// the true nodes form one 2N-connected component, and a layer of at least
/// one false node separates them from the box faces (margin() reports the
/// actual width).
class GridDomain {
 public:
  GridDomain(int dim, double h, Node lo, Node shape, std::vector<std::uint8_t> mask,
             std::string label = {}, nlohmann::json params = nlohmann::json::object());

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  const Node& lo() const { return lo_; }
  const Node& shape() const { return shape_; }
  std::int64_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
  std::size_t node_count() const { return mask_.size(); }
  std::size_t inside_count() const { return inside_count_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::string& label() const { return label_; }
  const nlohmann::json& params() const { return params_; }

  bool inside(std::size_t idx) const { return mask_[idx] != 0; }
  bool in_box(const Node& n) const;
  /// Linear index of an in-box node.
  std::size_t index(const Node& n) const;
  Node node(std::size_t idx) const;
  Point position(std::size_t idx) const;
  Point position(const Node& n) const;
  /// Closest lattice node to a physical point (may be out of the box).
  Node nearest_node(const Point& p) const;

  /// Smallest number of false layers between a true node and the box face.
  int margin() const { return margin_; }
  /// Largest extent of the set of true nodes, in length units.
  double diameter() const;

  /// Calls fn(idx) for every in-box node whose position is within distance
  /// < r of center.
  template <class Fn>
  void for_each_in_ball(const Point& center, double r, Fn&& fn) const;

 private:
  void check_connected() const;

  int dim_;
  double h_;
  Node lo_{};
  Node shape_{1, 1, 1};
  Node stride_{};
  std::vector<std::uint8_t> mask_;
  std::size_t inside_count_ = 0;
  int margin_ = 0;
  std::string label_;
  nlohmann::json params_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

template <class Fn>
void GridDomain::for_each_in_ball(const Point& center, double r, Fn&& fn) const {
  Node first{}, last{};
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= dim_) {
      first[d] = last[d] = 0;
      continue;
    }
    const auto lo_i = static_cast<std::int64_t>(std::floor((center[d] - r) / h_));
    const auto hi_i = static_cast<std::int64_t>(std::ceil((center[d] + r) / h_));
    first[d] = std::max(lo_i, lo_[d]);
    last[d] = std::min(hi_i, lo_[d] + shape_[d] - 1);
    if (first[d] > last[d]) return;
  }
  const double r2 = r * r;
  for (std::int64_t i = first[0]; i <= last[0]; ++i) {
    const double dx = i * h_ - center[0];
    for (std::int64_t j = first[1]; j <= last[1]; ++j) {
      const double dy = dim_ > 1 ? j * h_ - center[1] : 0.0;
      for (std::int64_t k = first[2]; k <= last[2]; ++k) {
        const double dz = dim_ > 2 ? k * h_ - center[2] : 0.0;
        if (dx * dx + dy * dy + dz * dz < r2) fn(index(Node{i, j, k}));
      }
    }
  }
}

/// Discrete boundary: true nodes with at least one false 2N-neighbour.
std::vector<std::size_t> boundary_points(const GridDomain& dom);

}  // namespace reiflab
