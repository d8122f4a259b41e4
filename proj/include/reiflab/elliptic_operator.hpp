#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "reiflab/multiindex.hpp"

namespace reiflab {

/// Constant-coefficient operator (-1)^m sum a_{ab} d^b d^a of order 2m.
/// Coefficients are stored as a dense matrix indexed by enumerate(N, m).
///
/// Construction accepts any square matrix of the right size so that broken
/// inputs can be inspected; operations that rely on symmetry or ellipticity
/// (ellipticity_constant, decompose, assemble) check it and throw.
class EllipticOperator {
 public:
  /// coeffs is row-major, size n*n with n = |enumerate(dim, m)|.
  EllipticOperator(int dim, int m, std::vector<double> coeffs);

  static EllipticOperator polyharmonic(int dim, int m);

  int dim() const { return dim_; }
  int half_order() const { return m_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double coeff(std::size_t i, std::size_t j) const { return coeffs_[i * size() + j]; }
  double coeff(const MultiIndex& a, const MultiIndex& b) const;

  bool is_symmetric() const;
  double max_abs() const;
  /// sum_{a,b} a_{ab} xi_a xi_b
  double quadratic_form(std::span<const double> xi) const;

 private:
  int dim_;
  int m_;
  std::vector<MultiIndex> indices_;
  std::vector<double> coeffs_;
};

/// Split A = B + D o (-d_N^2). B keeps a_{ab} where a_N = 0 or b_N = 0;
/// D has half-order m-1 and d_{a',b'} = a_{a'+e_N, b'+e_N}.
struct Decomposition {
  EllipticOperator b_part;
  EllipticOperator d_part;
};

/// Smallest eigenvalue of the coefficient matrix (largest admissible constant
/// in the ellipticity inequality). Throws NotElliptic if the matrix is not
/// symmetric or lambda_min <= 1e-10 * max|a|.
double ellipticity_constant(const EllipticOperator& op);

/// Eigenvalues of a symmetric n x n row-major matrix by cyclic Jacobi sweeps,
/// ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, std::size_t n);

Decomposition decompose(const EllipticOperator& op);

/// max |a_{ab} - b_{ab} - d_{a-e_N, b-e_N}| over all entries.
double reconstruction_residual(const EllipticOperator& op, const Decomposition& parts);

/// Fourier symbol sum a_{ab} k^a k^b; |k|^{2m} for the polyharmonic operator.
double apply_symbol(const EllipticOperator& op, std::span<const double> k);

/// {"N":..,"m":..,"entries":[{"alpha":"(..)","beta":"(..)","value":..}]},
/// upper triangle only.
nlohmann::json operator_to_json(const EllipticOperator& op);
/// Entries absent from the lower triangle are mirrored from the upper one.
/// Explicit lower entries are kept as given, so asymmetric input survives
/// loading and is caught by the symmetry checks.
EllipticOperator operator_from_json(const nlohmann::json& doc);

}  // namespace reiflab
