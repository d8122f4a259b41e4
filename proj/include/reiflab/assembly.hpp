#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reiflab/elliptic_operator.hpp"
#include "reiflab/grid_function.hpp"

namespace reiflab {

/// Compressed sparse rows, columns sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;

  std::size_t nonzeros() const { return vals.size(); }
  /// y = M x, rows in parallel.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  /// Entry (i, j), zero if not stored.
  double at(std::size_t i, std::size_t j) const;
  /// Bitwise M == M^T.
  bool is_symmetric() const;
};

/// The translation-invariant stencil of the discrete bilinear form:
/// a(e_q, e_p) = h^{N-2m} S(q - p) with
/// S(d) = sum_{a,b} a_{ab} sum_s w_a(s + d) w_b(s).
/// S(-d) is copied from S(d), so assembled matrices are exactly symmetric.
struct OperatorStencil {
  std::vector<Node> offsets;
  std::vector<double> values;
  double scale = 1.0;  // h^{N-2m}
};
OperatorStencil operator_stencil(const EllipticOperator& op, double h);

/// Linear system for the unknowns of a constrained minimisation: values on
/// `unknown nodes` are free, every other lattice node is pinned to `lift`
/// (zero for the plain Dirichlet problem).
struct DiscreteSystem {
  DomainPtr dom;
  OperatorStencil stencil;
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<std::size_t> node_of_unknown;
  std::vector<std::int64_t> unknown_of_node;  // -1 for pinned nodes
  std::optional<LatticeField> lift;

  std::size_t dim() const { return rhs.size(); }
  /// lift (or zero) with the unknown values scattered in.
  LatticeField expand(std::span<const double> x) const;
};

/// M[p][q] = h^N sum_x sum a_{ab} D^a e_q(x) D^b e_p(x), rhs[p] = h^N f(p).
/// Unknowns are exactly the mask-true nodes. Requires op.dim() == dom.dim(),
/// a symmetric elliptic op and dom.margin() >= op.half_order().
DiscreteSystem assemble(const EllipticOperator& op, DomainPtr dom, const GridFunction& f);

/// General form: unknowns are `unknown_nodes` (mask-true, ascending), the
/// remaining nodes are fixed to `lift`, and
/// rhs[p] = h^N f(p) - (M_full lift)(p).
DiscreteSystem assemble_constrained(const EllipticOperator& op, DomainPtr dom, const LatticeField& f,
                                    const LatticeField& lift, std::vector<std::size_t> unknown_nodes);

}  // namespace reiflab
