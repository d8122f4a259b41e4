#include "reiflab/grid_function.hpp"

#include <cmath>

#include "reiflab/errors.hpp"

namespace reiflab {

LatticeField::LatticeField(DomainPtr dom, std::vector<double> values) : dom_(std::move(dom)), values_(std::move(values)) {
  if (!dom_) throw InvalidInput("field needs a domain");
  if (values_.size() != dom_->node_count()) throw InvalidInput("field size does not match domain");
}

LatticeField LatticeField::zeros(DomainPtr dom) {
  const std::size_t n = dom->node_count();
  return LatticeField(std::move(dom), std::vector<double>(n, 0.0));
}

LatticeField LatticeField::sample(DomainPtr dom, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(dom->node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(dom->position(i));
  return LatticeField(std::move(dom), std::move(v));
}

double LatticeField::at_offset(const Node& node, const Node& offset) const {
  Node n{node[0] + offset[0], node[1] + offset[1], node[2] + offset[2]};
  if (!dom_->in_box(n)) return 0.0;
  return values_[dom_->index(n)];
}

LatticeField& LatticeField::operator+=(const LatticeField& other) {
  if (other.size() != size()) throw InvalidInput("field domains differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

LatticeField& LatticeField::operator-=(const LatticeField& other) {
  if (other.size() != size()) throw InvalidInput("field domains differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

namespace {

void check_masked(const LatticeField& f) {
  const auto& dom = f.domain();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw InvalidInput("grid function has a non-finite value");
    if (!dom.inside(i) && f[i] != 0.0) throw InvalidInput("grid function is non-zero outside the domain");
  }
}

}  // namespace

GridFunction::GridFunction(DomainPtr dom, std::vector<double> values) : field_(std::move(dom), std::move(values)) {
  check_masked(field_);
}

GridFunction::GridFunction(LatticeField field) : field_(std::move(field)) { check_masked(field_); }

GridFunction GridFunction::zeros(DomainPtr dom) { return GridFunction(LatticeField::zeros(std::move(dom))); }

GridFunction GridFunction::sample(DomainPtr dom, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(dom->node_count(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (dom->inside(i)) v[i] = fn(dom->position(i));
  return GridFunction(std::move(dom), std::move(v));
}

GridFunction GridFunction::restrict(const LatticeField& field) {
  std::vector<double> v(field.values());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!field.domain().inside(i)) v[i] = 0.0;
  return GridFunction(field.domain_ptr(), std::move(v));
}

}  // namespace reiflab
