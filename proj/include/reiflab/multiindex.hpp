#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reiflab {

/// Exponent vector alpha in N^N. Ordering between two indices of the same
/// length is graded lexicographic (see enumerate()).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(int dim);
  static MultiIndex unit(int dim, int axis);

  int dim() const { return static_cast<int>(exponents_.size()); }
  int order() const { return order_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Throws InvalidInput unless other <= *this componentwise.
  MultiIndex operator-(const MultiIndex& other) const;

  /// Partial order: alpha <= beta iff alpha_i <= beta_i for every i.
  bool below(const MultiIndex& other) const;

  /// "(2,0,1)"
  std::string to_string() const;
  static MultiIndex parse(std::string_view text);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Graded lexicographic: lower |alpha| first, then larger leading exponent.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b);

 private:
  std::vector<int> exponents_;
  int order_ = 0;
};

/// All alpha with |alpha| = m in N dimensions, graded lexicographic order:
/// (2,0), (1,1), (0,2). Length C(m+N-1, N-1).
std::vector<MultiIndex> enumerate(int dim, int m);

/// Position of alpha inside enumerate(alpha.dim(), alpha.order()).
std::size_t enumeration_index(const MultiIndex& alpha);

std::uint64_t factorial(int n);
std::uint64_t binomial(int n, int k);

/// alpha! / (beta! (alpha-beta)!), the coefficient in the Leibniz rule.
/// Throws InvalidInput unless beta <= alpha.
std::uint64_t leibniz_coeff(const MultiIndex& alpha, const MultiIndex& beta);

/// m!/alpha!, the multinomial coefficient. Always an integer, hence exact.
/// Throws InvalidInput unless |alpha| = m.
std::uint64_t factorial_weight(const MultiIndex& alpha, int m);

/// x^alpha = prod_i x_i^alpha_i
double monomial(const MultiIndex& alpha, const double* x);

}  // namespace reiflab
