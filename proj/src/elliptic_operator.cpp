#include "reiflab/elliptic_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reiflab/errors.hpp"

namespace reiflab {

EllipticOperator::EllipticOperator(int dim, int m, std::vector<double> coeffs)
    : dim_(dim), m_(m), indices_(enumerate(dim, m)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != indices_.size() * indices_.size())
    throw InvalidInput("coefficient matrix must be " + std::to_string(indices_.size()) + "x" +
                       std::to_string(indices_.size()) + " for N=" + std::to_string(dim) +
                       ", m=" + std::to_string(m));
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw InvalidInput("coefficients must be finite");
}

EllipticOperator EllipticOperator::polyharmonic(int dim, int m) {
  if (dim < 1 || m < 1) throw InvalidInput("polyharmonic needs N >= 1 and m >= 1");
  const auto idx = enumerate(dim, m);
  const std::size_t n = idx.size();
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) c[i * n + i] = static_cast<double>(factorial_weight(idx[i], m));
  return EllipticOperator(dim, m, std::move(c));
}

double EllipticOperator::coeff(const MultiIndex& a, const MultiIndex& b) const {
  if (a.dim() != dim_ || b.dim() != dim_ || a.order() != m_ || b.order() != m_)
    throw InvalidInput("multi-index does not belong to this operator");
  return coeff(enumeration_index(a), enumeration_index(b));
}

bool EllipticOperator::is_symmetric() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coeffs_[i * n + j] != coeffs_[j * n + i]) return false;
  return true;
}

double EllipticOperator::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double EllipticOperator::quadratic_form(std::span<const double> xi) const {
  const std::size_t n = size();
  if (xi.size() != n) throw InvalidInput("quadratic_form: wrong vector length");
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q += coeffs_[i * n + j] * xi[i] * xi[j];
  return q;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw InvalidInput("symmetric_eigenvalues: size mismatch");
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a[i * n + j] * a[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (double v : a) scale += v * v;
  for (int sweep = 0; sweep < 100 && off() > 1e-30 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

double ellipticity_constant(const EllipticOperator& op) {
  if (!op.is_symmetric()) throw NotElliptic("coefficient matrix is not symmetric");
  const double lmin = symmetric_eigenvalues(op.coefficients(), op.size()).front();
  if (lmin <= 1e-10 * op.max_abs())
    throw NotElliptic("operator is not elliptic (lambda_min = " + std::to_string(lmin) + ")");
  return lmin;
}

Decomposition decompose(const EllipticOperator& op) {
  if (op.half_order() < 1) throw InvalidInput("decompose needs m >= 1");
  ellipticity_constant(op);  // throws when not elliptic
  const int N = op.dim();
  const int m = op.half_order();
  const auto& idx = op.indices();
  const std::size_t n = idx.size();
  const MultiIndex eN = MultiIndex::unit(N, N - 1);

  std::vector<double> b(op.coefficients());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (idx[i][N - 1] > 0 && idx[j][N - 1] > 0) b[i * n + j] = 0.0;

  const auto sub = enumerate(N, m - 1);
  const std::size_t k = sub.size();
  std::vector<std::size_t> lift(k);
  for (std::size_t i = 0; i < k; ++i) lift[i] = enumeration_index(sub[i] + eN);
  std::vector<double> d(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) d[i * k + j] = op.coeff(lift[i], lift[j]);

  return {EllipticOperator(N, m, std::move(b)), EllipticOperator(N, m - 1, std::move(d))};
}

double reconstruction_residual(const EllipticOperator& op, const Decomposition& parts) {
  const int N = op.dim();
  const auto& idx = op.indices();
  const std::size_t n = idx.size();
  const MultiIndex eN = MultiIndex::unit(N, N - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double rebuilt = parts.b_part.coeff(i, j);
      if (idx[i][N - 1] > 0 && idx[j][N - 1] > 0)
        rebuilt += parts.d_part.coeff(enumeration_index(idx[i] - eN), enumeration_index(idx[j] - eN));
      worst = std::max(worst, std::abs(op.coeff(i, j) - rebuilt));
    }
  }
  return worst;
}

double apply_symbol(const EllipticOperator& op, std::span<const double> k) {
  if (static_cast<int>(k.size()) != op.dim()) throw InvalidInput("apply_symbol: frequency has wrong length");
  const std::size_t n = op.size();
  std::vector<double> mono(n);
  for (std::size_t i = 0; i < n; ++i) mono[i] = monomial(op.indices()[i], k.data());
  return op.quadratic_form(mono);
}

nlohmann::json operator_to_json(const EllipticOperator& op) {
  nlohmann::json entries = nlohmann::json::array();
  const auto& idx = op.indices();
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i; j < idx.size(); ++j)
      if (op.coeff(i, j) != 0.0)
        entries.push_back({{"alpha", idx[i].to_string()}, {"beta", idx[j].to_string()}, {"value", op.coeff(i, j)}});
  return {{"N", op.dim()}, {"m", op.half_order()}, {"entries", entries}};
}

EllipticOperator operator_from_json(const nlohmann::json& doc) {
  try {
    const int N = doc.at("N").get<int>();
    const int m = doc.at("m").get<int>();
    if (N < 1 || m < 0) throw InvalidInput("operator needs N >= 1 and m >= 0");
    const auto idx = enumerate(N, m);
    const std::size_t n = idx.size();
    std::vector<double> c(n * n, 0.0);
    std::vector<std::uint8_t> given(n * n, 0);
    for (const auto& e : doc.at("entries")) {
      const auto a = MultiIndex::parse(e.at("alpha").get<std::string>());
      const auto b = MultiIndex::parse(e.at("beta").get<std::string>());
      if (a.dim() != N || b.dim() != N || a.order() != m || b.order() != m)
        throw InvalidInput("entry " + a.to_string() + "," + b.to_string() + " does not match N/m");
      const std::size_t i = enumeration_index(a), j = enumeration_index(b);
      c[i * n + j] = e.at("value").get<double>();
      given[i * n + j] = 1;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!given[i * n + j] && given[j * n + i]) c[i * n + j] = c[j * n + i];
    return EllipticOperator(N, m, std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("operator json: ") + e.what());
  }
}

}  // namespace reiflab
