#include "reiflab/multiindex.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "reiflab/errors.hpp"

namespace reiflab {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_)
    if (e < 0) throw InvalidInput("multi-index exponents must be non-negative");
  order_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

MultiIndex MultiIndex::unit(int dim, int axis) {
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  e.at(static_cast<std::size_t>(axis)) = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.dim() != dim()) throw InvalidInput("multi-index dimension mismatch");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.below(*this)) throw InvalidInput(other.to_string() + " is not <= " + to_string());
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exponents_[i];
  return MultiIndex(std::move(e));
}

bool MultiIndex::below(const MultiIndex& other) const {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < exponents_.size(); ++i)
    if (exponents_[i] > other.exponents_[i]) return false;
  return true;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(exponents_[i]);
  }
  return s + ')';
}

MultiIndex MultiIndex::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.size() < 3 || text.front() != '(' || text.back() != ')')
    throw InvalidInput("malformed multi-index '" + std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  std::vector<int> e;
  while (true) {
    const auto comma = text.find(',');
    const auto part = trim(text.substr(0, comma));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size() || value < 0)
      throw InvalidInput("malformed multi-index component '" + std::string(part) + "'");
    e.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return MultiIndex(std::move(e));
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  if (a.order() != b.order()) return a.order() < b.order();
  // Larger leading exponent first: (2,0) < (1,1) < (0,2).
  return std::lexicographical_compare(a.exponents_.begin(), a.exponents_.end(), b.exponents_.begin(),
                                      b.exponents_.end(), std::greater<>{});
}

namespace {

void fill(int axis, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  const auto last = cur.size() - 1;
  if (static_cast<std::size_t>(axis) == last) {
    cur[last] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(axis)] = e;
    fill(axis + 1, remaining - e, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate(int dim, int m) {
  if (dim < 1 || m < 0) throw InvalidInput("enumerate needs N >= 1 and m >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  fill(0, m, cur, out);
  return out;
}

std::size_t enumeration_index(const MultiIndex& alpha) {
  const auto all = enumerate(alpha.dim(), alpha.order());
  const auto it = std::lower_bound(all.begin(), all.end(), alpha);
  return static_cast<std::size_t>(it - all.begin());
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw InvalidInput("factorial argument out of range");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

std::uint64_t leibniz_coeff(const MultiIndex& alpha, const MultiIndex& beta) {
  if (!beta.below(alpha)) throw InvalidInput(beta.to_string() + " is not <= " + alpha.to_string());
  std::uint64_t c = 1;
  for (int i = 0; i < alpha.dim(); ++i) c *= binomial(alpha[i], beta[i]);
  return c;
}

std::uint64_t factorial_weight(const MultiIndex& alpha, int m) {
  if (alpha.order() != m) throw InvalidInput("factorial_weight needs |alpha| = m");
  // Product of binomials avoids overflowing m! for larger m.
  std::uint64_t w = 1;
  int partial = 0;
  for (int i = 0; i < alpha.dim(); ++i) {
    partial += alpha[i];
    w *= binomial(partial, alpha[i]);
  }
  return w;
}

double monomial(const MultiIndex& alpha, const double* x) {
  double p = 1.0;
  for (int i = 0; i < alpha.dim(); ++i)
    for (int k = 0; k < alpha[i]; ++k) p *= x[i];
  return p;
}

}  // namespace reiflab
