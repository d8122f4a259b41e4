#pragma once

#include <vector>

#include "reiflab/elliptic_operator.hpp"
#include "reiflab/grid_function.hpp"
#include "reiflab/multiindex.hpp"

namespace reiflab {

/// D_eps u = (u(x + eps e_axis) - u(x)) / eps with eps = steps * h (steps may
/// be negative). Evaluated on the full box with zero past its faces.
LatticeField forward_difference(const LatticeField& u, int axis, int steps = 1);

/// D_eps^alpha: one forward_difference per unit of alpha_i, in axis order.
/// alpha = 0 returns a copy of u.
LatticeField iterated_difference(const LatticeField& u, const MultiIndex& alpha, int steps = 1);

/// One component per alpha in enumerate(N, m).
std::vector<LatticeField> grad_m(const LatticeField& u, int m);

/// Weights of D_h^alpha as a stencil: D^alpha u(x) = h^{-|alpha|} sum_j
/// w_j u(x + j) over offsets 0 <= j <= alpha, w_j = (-1)^{|alpha-j|}
/// prod C(alpha_i, j_i).
struct DifferenceStencil {
  std::vector<Node> offsets;
  std::vector<double> weights;
};
DifferenceStencil difference_stencil(const MultiIndex& alpha);

/// D^alpha u at one node, h^{-|alpha|} included.
double difference_at(const LatticeField& u, const Node& node, const DifferenceStencil& st, int order);

enum class EnergyMetric { Euclidean, AWeighted };

/// h^N sum over lattice nodes x with |x - center| < r of |grad^m u(x)|^2
/// (Euclidean over the multi-indices of length m) or of
/// sum a_{ab} D^a u D^b u (AWeighted). Includes nodes outside the domain, so
/// the zero-extension fringe counts.
double energy_local(const EllipticOperator& op, const LatticeField& u, const Point& center, double r,
                    EnergyMetric metric = EnergyMetric::Euclidean);

/// a(u, v) = h^N sum_x sum a_{ab} D^a u D^b v over the whole box.
double bilinear_form(const EllipticOperator& op, const LatticeField& u, const LatticeField& v);

/// h^N sum_x u v over the box.
double lattice_inner(const LatticeField& u, const LatticeField& v);

}  // namespace reiflab
