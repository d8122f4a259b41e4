#include "reiflab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reiflab/differences.hpp"
#include "reiflab/errors.hpp"
#include "reiflab/parallel.hpp"

namespace reiflab {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  parallel_for(rows, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
    y[i] = s;
  });
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return vals[static_cast<std::size_t>(it - cols.begin())];
}

bool CsrMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (at(cols[k], i) != vals[k]) return false;
  return true;
}

OperatorStencil operator_stencil(const EllipticOperator& op, double h) {
  const int N = op.dim();
  const int m = op.half_order();
  const int width = 2 * m + 1;
  auto slot = [&](const Node& d) {
    std::size_t s = 0;
    for (int i = 0; i < N; ++i) s = s * static_cast<std::size_t>(width) + static_cast<std::size_t>(d[i] + m);
    return s;
  };
  std::size_t total = 1;
  for (int i = 0; i < N; ++i) total *= static_cast<std::size_t>(width);
  std::vector<double> dense(total, 0.0);

  std::vector<DifferenceStencil> w;
  for (const auto& alpha : op.indices()) w.push_back(difference_stencil(alpha));
  for (std::size_t a = 0; a < op.size(); ++a)
    for (std::size_t b = 0; b < op.size(); ++b) {
      const double c = op.coeff(a, b);
      if (c == 0.0) continue;
      for (std::size_t ja = 0; ja < w[a].offsets.size(); ++ja)
        for (std::size_t jb = 0; jb < w[b].offsets.size(); ++jb) {
          const Node& oa = w[a].offsets[ja];
          const Node& ob = w[b].offsets[jb];
          dense[slot(Node{oa[0] - ob[0], oa[1] - ob[1], oa[2] - ob[2]})] += c * w[a].weights[ja] * w[b].weights[jb];
        }
    }

  OperatorStencil st;
  st.scale = std::pow(h, N - 2 * m);
  // Slots are in lexicographic offset order, so slot s and total-1-s hold
  // opposite offsets; the upper half is mirrored from the lower one.
  for (std::size_t s = 0; s < total; ++s) {
    const double value = s < total / 2 + 1 ? dense[s] : dense[total - 1 - s];
    if (value == 0.0) continue;
    Node d{};
    std::size_t rem = s;
    for (int i = N - 1; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(width)) - m;
      rem /= static_cast<std::size_t>(width);
    }
    st.offsets.push_back(d);
    st.values.push_back(value);
  }
  return st;
}

LatticeField DiscreteSystem::expand(std::span<const double> x) const {
  LatticeField out = lift ? *lift : LatticeField::zeros(dom);
  for (std::size_t k = 0; k < node_of_unknown.size(); ++k) out[node_of_unknown[k]] = x[k];
  return out;
}

namespace {

void check_compatible(const EllipticOperator& op, const GridDomain& dom) {
  if (op.dim() != dom.dim())
    throw InvalidInput("operator dimension " + std::to_string(op.dim()) + " does not match domain dimension " +
                       std::to_string(dom.dim()));
  if (op.half_order() < 1) throw InvalidInput("assembly needs an operator of order >= 2");
  ellipticity_constant(op);
  if (dom.margin() < op.half_order())
    throw InvalidInput("domain margin " + std::to_string(dom.margin()) + " is smaller than m = " +
                       std::to_string(op.half_order()));
}

constexpr double kMaxMatrixBytes = 6.0e9;

}  // namespace

DiscreteSystem assemble_constrained(const EllipticOperator& op, DomainPtr dom_ptr, const LatticeField& f,
                                    const LatticeField& lift, std::vector<std::size_t> unknown_nodes) {
  const GridDomain& dom = *dom_ptr;
  check_compatible(op, dom);
  if (f.size() != dom.node_count() || lift.size() != dom.node_count())
    throw InvalidInput("assemble: field does not live on the domain lattice");

  DiscreteSystem sys;
  sys.dom = dom_ptr;
  sys.stencil = operator_stencil(op, dom.spacing());
  const auto& st = sys.stencil;
  const double estimate = static_cast<double>(unknown_nodes.size()) * static_cast<double>(st.values.size()) * 16.0;
  if (estimate > kMaxMatrixBytes)
    throw InvalidInput("assembled matrix would need ~" + std::to_string(static_cast<long long>(estimate / 1e9)) +
                       " GB; coarsen h or shrink the domain");

  sys.unknown_of_node.assign(dom.node_count(), -1);
  for (std::size_t k = 0; k < unknown_nodes.size(); ++k) {
    const std::size_t node = unknown_nodes[k];
    if (node >= dom.node_count() || !dom.inside(node)) throw InvalidInput("assemble: unknown outside the domain");
    if (k > 0 && node <= unknown_nodes[k - 1]) throw InvalidInput("assemble: unknown nodes must be ascending");
    sys.unknown_of_node[node] = static_cast<std::int64_t>(k);
  }
  sys.node_of_unknown = std::move(unknown_nodes);
  const std::size_t n = sys.node_of_unknown.size();

  std::vector<std::int64_t> shift(st.offsets.size());
  for (std::size_t s = 0; s < shift.size(); ++s)
    for (int d = 0; d < dom.dim(); ++d) shift[s] += st.offsets[s][static_cast<std::size_t>(d)] * dom.stride(d);

  // Margin >= m keeps every stencil neighbour of a mask node inside the box.
  std::vector<std::size_t> counts(n, 0);
  parallel_for(n, [&](std::size_t k) {
    const auto p = static_cast<std::int64_t>(sys.node_of_unknown[k]);
    std::size_t c = 0;
    for (std::int64_t s : shift)
      if (sys.unknown_of_node[static_cast<std::size_t>(p + s)] >= 0) ++c;
    counts[k] = c;
  });
  auto& M = sys.matrix;
  M.rows = n;
  M.row_ptr.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) M.row_ptr[k + 1] = M.row_ptr[k] + counts[k];
  M.cols.resize(M.row_ptr[n]);
  M.vals.resize(M.row_ptr[n]);
  sys.rhs.assign(n, 0.0);

  const double volume = std::pow(dom.spacing(), dom.dim());
  parallel_for(n, [&](std::size_t k) {
    const auto p = static_cast<std::int64_t>(sys.node_of_unknown[k]);
    std::size_t pos = M.row_ptr[k];
    double pinned = 0.0;
    for (std::size_t s = 0; s < shift.size(); ++s) {
      const auto q = static_cast<std::size_t>(p + shift[s]);
      const std::int64_t col = sys.unknown_of_node[q];
      if (col >= 0) {
        M.cols[pos] = static_cast<std::size_t>(col);
        M.vals[pos] = st.scale * st.values[s];
        ++pos;
      } else {
        pinned += st.values[s] * lift[q];
      }
    }
    sys.rhs[k] = volume * f[static_cast<std::size_t>(p)] - st.scale * pinned;
  });
  sys.lift = lift;
  return sys;
}

DiscreteSystem assemble(const EllipticOperator& op, DomainPtr dom, const GridFunction& f) {
  if (f.domain_ptr() != dom && f.field().size() != dom->node_count())
    throw InvalidInput("assemble: source does not live on the domain");
  std::vector<std::size_t> unknowns;
  unknowns.reserve(dom->inside_count());
  for (std::size_t i = 0; i < dom->node_count(); ++i)
    if (dom->inside(i)) unknowns.push_back(i);
  auto sys = assemble_constrained(op, dom, f.field(), LatticeField::zeros(dom), std::move(unknowns));
  sys.lift.reset();
  return sys;
}

}  // namespace reiflab
