#include "reiflab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <limits>

#include "reiflab/parallel.hpp"

namespace reiflab {
namespace {

constexpr int kMaxRestarts = 8;
constexpr int kMaxRefinements = 12;

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below x.
std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i ? e[i - 1] * e[i - 1] : 0.0;
    q = d[i] - x - (i ? off / q : 0.0);
    if (q == 0.0) q = std::numeric_limits<double>::min();
    if (q < 0.0) ++count;
  }
  return count;
}

double smallest_tridiagonal_eigenvalue(const std::vector<double>& d, const std::vector<double>& e) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double radius = (i ? std::abs(e[i - 1]) : 0.0) + (i < e.size() ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - radius);
    hi = std::max(hi, d[i] + radius);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(std::abs(hi), std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(d, e, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

CgResult conjugate_gradient(const CsrMatrix& M, std::span<const double> b, const CgOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = M.rows;
  if (b.size() != n) throw InvalidInput("conjugate_gradient: rhs size mismatch");
  if (!opt.initial_guess.empty() && opt.initial_guess.size() != n)
    throw InvalidInput("conjugate_gradient: initial guess size mismatch");
  CgResult out;
  auto& rep = out.report;

  // The iterate and its residual are kept in extended precision. Rounding x
  // to double alone leaves a residual of order eps * cond(M), which for fine
  // biharmonic grids sits above the usual tolerances; inner CG runs in double
  // on the correction equation.
  std::vector<long double> xl(n, 0.0L);
  if (!opt.initial_guess.empty())
    for (std::size_t i = 0; i < n; ++i) xl[i] = opt.initial_guess[i];
  std::vector<double> r(n), q(n), z(n), p(n), d(n);
  auto residual = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      long double s = b[i];
      for (std::size_t k = M.row_ptr[i]; k < M.row_ptr[i + 1]; ++k)
        s -= static_cast<long double>(M.vals[k]) * xl[M.cols[k]];
      r[i] = static_cast<double>(s);
    }
    return norm2(r);
  };

  const double bnorm = norm2(b);
  double rnorm = residual();
  auto finish = [&] {
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = static_cast<double>(xl[i]);
    long double e = 0.0L;
    for (std::size_t i = 0; i < n; ++i) e += xl[i] * (static_cast<long double>(b[i]) + r[i]);
    rep.energy = static_cast<double>(-0.5L * e) + 0.0;  // no negative zero
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (bnorm == 0.0 && rnorm == 0.0) {
    rep.converged = true;
    finish();
    return out;
  }
  const double ref = bnorm > 0.0 ? bnorm : 1.0;

  const auto diag = M.diagonal();
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) throw SolverError("matrix has a non-positive diagonal entry");
    inv[i] = 1.0 / diag[i];
  }
  auto precondition = [&] { parallel_for(n, [&](std::size_t i) { z[i] = inv[i] * r[i]; }); };
  auto energy_of = [&] {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += (xl[i] + d[i]) * (static_cast<long double>(b[i]) + r[i]);
    return static_cast<double>(-0.5L * s);
  };

  std::vector<double> alphas, betas;
  bool lanczos_open = true;
  std::size_t it = 0;
  double res = rnorm / ref;
  for (int outer = 0; res > opt.tol && it < opt.max_iter && outer < kMaxRefinements; ++outer) {
    // CG on M d = r from d = 0, with restarts from the double-precision true
    // residual while they still make progress.
    std::fill(d.begin(), d.end(), 0.0);
    const std::vector<double> r0 = r;
    double seg_res = res, restart_res = res;
    for (int restart = 0;; ++restart) {
      precondition();
      p = z;
      double rz = dot(r, z);
      while (seg_res > opt.tol && it < opt.max_iter) {
        M.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0))
          throw SolverError("non-positive curvature <p, Mp> = " + std::to_string(pq) + " at iteration " +
                            std::to_string(it) + "; the assembled matrix is not positive definite");
        const double alpha = rz / pq;
        parallel_for(n, [&](std::size_t i) {
          d[i] += alpha * p[i];
          r[i] -= alpha * q[i];
        });
        ++it;
        seg_res = norm2(r) / ref;
        if (opt.record_energy) rep.energy_history.push_back(energy_of());
        precondition();
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        if (lanczos_open) {
          // The Lanczos relation only holds within the first segment.
          alphas.push_back(alpha);
          betas.push_back(beta);
        }
        rz = rz_next;
        parallel_for(n, [&](std::size_t i) { p[i] = z[i] + beta * p[i]; });
      }
      lanczos_open = false;
      // The recursive residual drifts from r0 - Md; restart from the true one.
      M.multiply(d, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = r0[i] - q[i];
      seg_res = norm2(r) / ref;
      if (seg_res <= opt.tol || it >= opt.max_iter || restart >= kMaxRestarts || seg_res > 0.5 * restart_res) break;
      restart_res = seg_res;
    }
    for (std::size_t i = 0; i < n; ++i) xl[i] += d[i];
    std::fill(d.begin(), d.end(), 0.0);
    const double next = residual() / ref;
    const bool stalled = next > 0.5 * res;
    res = next;
    if (stalled) break;
  }

  rep.iterations = it;
  rep.relative_residual = res;
  rep.converged = res <= opt.tol;
  if (!alphas.empty()) {
    std::vector<double> dd(alphas.size()), e(alphas.size() > 1 ? alphas.size() - 1 : 0);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      dd[j] = 1.0 / alphas[j] + (j ? betas[j - 1] / alphas[j - 1] : 0.0);
      if (j + 1 < alphas.size()) e[j] = std::sqrt(betas[j]) / alphas[j];
    }
    const double mu_min = smallest_tridiagonal_eigenvalue(dd, e);
    precondition();
    const double rz_true = dot(r, z);
    rep.error_energy_bound = mu_min > 0.0 ? rz_true / mu_min : std::numeric_limits<double>::infinity();
  }
  finish();
  return out;
}

std::pair<LatticeField, SolveReport> solve_system(const DiscreteSystem& sys, const CgOptions& options) {
  auto result = conjugate_gradient(sys.matrix, sys.rhs, options);
  if (!result.report.converged)
    throw ConvergenceError("CG stopped at relative residual " + format_sci(result.report.relative_residual) +
                               " after " + std::to_string(result.report.iterations) + " iterations",
                           result.report);
  return {sys.expand(result.x), std::move(result.report)};
}

std::pair<GridFunction, SolveReport> solve_dirichlet(const DiscreteSystem& sys, double tol, std::size_t max_iter) {
  if (sys.lift) throw InvalidInput("solve_dirichlet expects a system without lift; use solve_system");
  CgOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  auto [field, report] = solve_system(sys, options);
  return {GridFunction(std::move(field)), std::move(report)};
}

Replacement polyharmonic_replacement(const EllipticOperator& op, const GridFunction& u, const Point& center, double r,
                                     const ReplacementOptions& options) {
  const auto& dom = u.domain();
  std::vector<std::size_t> unknowns;
  dom.for_each_in_ball(center, r, [&](std::size_t i) {
    if (dom.inside(i)) unknowns.push_back(i);
  });
  if (unknowns.empty()) {
    SolveReport idle;
    idle.converged = true;
    return Replacement{u, idle, 0, true};
  }
  std::sort(unknowns.begin(), unknowns.end());

  const auto sys = assemble_constrained(op, u.domain_ptr(), LatticeField::zeros(u.domain_ptr()), u.field(), unknowns);
  CgOptions cg;
  cg.tol = options.tol;
  cg.max_iter = options.max_iter;
  const LatticeField& start = options.start ? *options.start : u.field();
  cg.initial_guess.resize(unknowns.size());
  for (std::size_t k = 0; k < unknowns.size(); ++k) cg.initial_guess[k] = start[unknowns[k]];

  auto [field, report] = solve_system(sys, cg);
  return Replacement{GridFunction(std::move(field)), std::move(report), unknowns.size(), false};
}

}  // namespace reiflab
