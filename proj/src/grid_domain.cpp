#include "reiflab/grid_domain.hpp"

#include <deque>
#include <limits>

#include "reiflab/errors.hpp"

namespace reiflab {

GridDomain::GridDomain(int dim, double h, Node lo, Node shape, std::vector<std::uint8_t> mask, std::string label,
                       nlohmann::json params)
    : dim_(dim), h_(h), lo_(lo), shape_(shape), mask_(std::move(mask)), label_(std::move(label)),
      params_(std::move(params)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw InvalidInput("grid dimension must be 1, 2 or 3");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw InvalidInput("grid spacing must be positive");
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= dim_) {
      lo_[d] = 0;
      shape_[d] = 1;
    } else if (shape_[d] < 1) {
      throw InvalidInput("grid shape must be positive");
    }
  }
  stride_[2] = 1;
  stride_[1] = shape_[2];
  stride_[0] = shape_[1] * shape_[2];
  if (mask_.size() != static_cast<std::size_t>(shape_[0] * shape_[1] * shape_[2]))
    throw InvalidInput("mask size does not match grid shape");

  margin_ = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!mask_[i]) continue;
    ++inside_count_;
    const Node n = node(i);
    for (int d = 0; d < dim_; ++d) {
      const auto local = n[d] - lo_[d];
      margin_ = std::min<int>(margin_, static_cast<int>(std::min(local, shape_[d] - 1 - local)));
    }
  }
  if (inside_count_ == 0) throw InvalidInput("domain '" + label_ + "' has no interior node");
  if (margin_ < 1) throw InvalidInput("domain '" + label_ + "' touches its bounding box");
  check_connected();
}

bool GridDomain::in_box(const Node& n) const {
  for (int d = 0; d < dim_; ++d)
    if (n[d] < lo_[d] || n[d] >= lo_[d] + shape_[d]) return false;
  return true;
}

std::size_t GridDomain::index(const Node& n) const {
  std::int64_t idx = 0;
  for (int d = 0; d < dim_; ++d) idx += (n[d] - lo_[d]) * stride_[d];
  return static_cast<std::size_t>(idx);
}

Node GridDomain::node(std::size_t idx) const {
  Node n{};
  auto rem = static_cast<std::int64_t>(idx);
  for (int d = 0; d < kMaxDim; ++d) {
    n[d] = rem / stride_[d];
    rem -= n[d] * stride_[d];
    if (d < dim_) n[d] += lo_[d];
  }
  return n;
}

Point GridDomain::position(const Node& n) const {
  Point p{};
  for (int d = 0; d < dim_; ++d) p[d] = static_cast<double>(n[d]) * h_;
  return p;
}

Point GridDomain::position(std::size_t idx) const { return position(node(idx)); }

Node GridDomain::nearest_node(const Point& p) const {
  Node n{};
  for (int d = 0; d < dim_; ++d) n[d] = static_cast<std::int64_t>(std::llround(p[d] / h_));
  return n;
}

double GridDomain::diameter() const {
  Node first, last;
  first.fill(std::numeric_limits<std::int64_t>::max());
  last.fill(std::numeric_limits<std::int64_t>::min());
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!mask_[i]) continue;
    const Node n = node(i);
    for (int d = 0; d < dim_; ++d) {
      first[d] = std::min(first[d], n[d]);
      last[d] = std::max(last[d], n[d]);
    }
  }
  double s = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double e = static_cast<double>(last[d] - first[d]) * h_;
    s += e * e;
  }
  return std::sqrt(s);
}

void GridDomain::check_connected() const {
  std::vector<std::uint8_t> seen(mask_.size(), 0);
  std::size_t start = 0;
  while (!mask_[start]) ++start;
  std::deque<std::size_t> queue{start};
  seen[start] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    ++reached;
    for (int d = 0; d < dim_; ++d) {
      for (int s : {-1, 1}) {
        // Margin >= 1 keeps neighbours of true nodes inside the box.
        const std::size_t j = static_cast<std::size_t>(static_cast<std::int64_t>(i) + s * stride_[d]);
        if (mask_[j] && !seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  if (reached != inside_count_)
    throw InvalidInput("domain '" + label_ + "' is not connected (" + std::to_string(reached) + " of " +
                       std::to_string(inside_count_) + " nodes reachable)");
}

std::vector<std::size_t> boundary_points(const GridDomain& dom) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dom.node_count(); ++i) {
    if (!dom.inside(i)) continue;
    bool edge = false;
    for (int d = 0; d < dom.dim() && !edge; ++d)
      for (int s : {-1, 1})
        if (!dom.inside(static_cast<std::size_t>(static_cast<std::int64_t>(i) + s * dom.stride(d)))) edge = true;
    if (edge) out.push_back(i);
  }
  return out;
}

}  // namespace reiflab
