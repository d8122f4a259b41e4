#pragma once

#include <functional>
#include <vector>

#include "reiflab/grid_domain.hpp"

namespace reiflab {

/// Real values on every lattice node of a domain's bounding box. Values past
/// the box are taken to be zero. No masking: difference quotients and lifted
/// boundary data live here.
class LatticeField {
 public:
  LatticeField(DomainPtr dom, std::vector<double> values);
  static LatticeField zeros(DomainPtr dom);
  /// values[i] = fn(position(i)) on every box node.
  static LatticeField sample(DomainPtr dom, const std::function<double(const Point&)>& fn);

  const GridDomain& domain() const { return *dom_; }
  const DomainPtr& domain_ptr() const { return dom_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Value at node + offset, zero outside the box.
  double at_offset(const Node& node, const Node& offset) const;

  LatticeField& operator+=(const LatticeField& other);
  LatticeField& operator-=(const LatticeField& other);
  friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
  friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }

 private:
  DomainPtr dom_;
  std::vector<double> values_;
};

/// A LatticeField that vanishes on every mask-false node: the zero extension
/// of a function in H^m_0 of the domain. The invariant is enforced at
/// construction and cannot be broken afterwards (only const access).
class GridFunction {
 public:
  /// Throws InvalidInput if a value is non-finite or a mask-false value is
  /// non-zero.
  GridFunction(DomainPtr dom, std::vector<double> values);
  explicit GridFunction(LatticeField field);
  static GridFunction zeros(DomainPtr dom);
  /// fn on mask-true nodes, zero elsewhere.
  static GridFunction sample(DomainPtr dom, const std::function<double(const Point&)>& fn);
  /// Copies field values on mask-true nodes and zeroes the rest.
  static GridFunction restrict(const LatticeField& field);

  const GridDomain& domain() const { return field_.domain(); }
  const DomainPtr& domain_ptr() const { return field_.domain_ptr(); }
  const LatticeField& field() const { return field_; }
  operator const LatticeField&() const { return field_; }
  double operator[](std::size_t i) const { return field_[i]; }
  const std::vector<double>& values() const { return field_.values(); }

 private:
  LatticeField field_;
};

}  // namespace reiflab
