#include "reiflab/differences.hpp"

#include <cmath>

#include "reiflab/errors.hpp"
#include "reiflab/parallel.hpp"

namespace reiflab {

LatticeField forward_difference(const LatticeField& u, int axis, int steps) {
  const auto& dom = u.domain();
  if (axis < 0 || axis >= dom.dim()) throw InvalidInput("forward_difference: axis out of range");
  if (steps == 0) throw InvalidInput("forward_difference: step must be non-zero");
  const double eps = steps * dom.spacing();
  const std::int64_t stride = dom.stride(axis);
  const std::int64_t extent = dom.shape()[static_cast<std::size_t>(axis)];
  const std::int64_t lo = dom.lo()[static_cast<std::size_t>(axis)];
  std::vector<double> out(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    const std::int64_t local = dom.node(i)[static_cast<std::size_t>(axis)] - lo + steps;
    const double ahead = (local >= 0 && local < extent) ? u[static_cast<std::size_t>(static_cast<std::int64_t>(i) + steps * stride)] : 0.0;
    out[i] = (ahead - u[i]) / eps;
  });
  return LatticeField(u.domain_ptr(), std::move(out));
}

LatticeField iterated_difference(const LatticeField& u, const MultiIndex& alpha, int steps) {
  if (alpha.dim() != u.domain().dim()) throw InvalidInput("iterated_difference: multi-index dimension mismatch");
  LatticeField out = u;
  for (int i = 0; i < alpha.dim(); ++i)
    for (int k = 0; k < alpha[i]; ++k) out = forward_difference(out, i, steps);
  return out;
}

std::vector<LatticeField> grad_m(const LatticeField& u, int m) {
  std::vector<LatticeField> out;
  for (const auto& alpha : enumerate(u.domain().dim(), m)) out.push_back(iterated_difference(u, alpha));
  return out;
}

DifferenceStencil difference_stencil(const MultiIndex& alpha) {
  DifferenceStencil st;
  const int N = alpha.dim();
  std::array<int, kMaxDim> ext{0, 0, 0};
  for (int i = 0; i < N; ++i) ext[static_cast<std::size_t>(i)] = alpha[i];
  for (int a = 0; a <= ext[0]; ++a)
    for (int b = 0; b <= ext[1]; ++b)
      for (int c = 0; c <= ext[2]; ++c) {
        const std::array<int, kMaxDim> j{a, b, c};
        double w = 1.0;
        for (int i = 0; i < N; ++i) {
          const int gap = ext[static_cast<std::size_t>(i)] - j[static_cast<std::size_t>(i)];
          w *= static_cast<double>(binomial(ext[static_cast<std::size_t>(i)], j[static_cast<std::size_t>(i)])) *
               (gap % 2 ? -1.0 : 1.0);
        }
        st.offsets.push_back(Node{a, b, c});
        st.weights.push_back(w);
      }
  return st;
}

double difference_at(const LatticeField& u, const Node& node, const DifferenceStencil& st, int order) {
  double s = 0.0;
  for (std::size_t k = 0; k < st.offsets.size(); ++k) s += st.weights[k] * u.at_offset(node, st.offsets[k]);
  return s / std::pow(u.domain().spacing(), order);
}

double energy_local(const EllipticOperator& op, const LatticeField& u, const Point& center, double r,
                    EnergyMetric metric) {
  const auto& dom = u.domain();
  if (op.dim() != dom.dim()) throw InvalidInput("energy_local: operator and domain dimensions differ");
  const int m = op.half_order();
  std::vector<DifferenceStencil> stencils;
  for (const auto& alpha : op.indices()) stencils.push_back(difference_stencil(alpha));
  const std::size_t n = stencils.size();
  std::vector<double> xi(n);
  double total = 0.0;
  dom.for_each_in_ball(center, r, [&](std::size_t idx) {
    const Node node = dom.node(idx);
    for (std::size_t a = 0; a < n; ++a) xi[a] = difference_at(u, node, stencils[a], m);
    if (metric == EnergyMetric::Euclidean) {
      for (double v : xi) total += v * v;
    } else {
      total += op.quadratic_form(xi);
    }
  });
  return total * std::pow(dom.spacing(), dom.dim());
}

double bilinear_form(const EllipticOperator& op, const LatticeField& u, const LatticeField& v) {
  const auto gu = grad_m(u, op.half_order());
  const auto gv = grad_m(v, op.half_order());
  const std::size_t n = op.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = op.coeff(i, j);
      if (a == 0.0) continue;
      total += a * dot(gu[i].values(), gv[j].values());
    }
  return total * std::pow(u.domain().spacing(), u.domain().dim());
}

double lattice_inner(const LatticeField& u, const LatticeField& v) {
  return dot(u.values(), v.values()) * std::pow(u.domain().spacing(), u.domain().dim());
}

}  // namespace reiflab
