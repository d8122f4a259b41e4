#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "reiflab/assembly.hpp"
#include "reiflab/errors.hpp"

namespace reiflab {

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  /// 1/2 <Mu,u> - <b,u> at the returned iterate.
  double energy = 0.0;
  double wall_time = 0.0;
  bool converged = false;
  /// Upper estimate of the error energy <M e, e> = r^T M^{-1} r, using the
  /// smallest Ritz value of the Jacobi-preconditioned Lanczos matrix built
  /// from the CG coefficients. Zero when the solve is exact.
  double error_energy_bound = 0.0;
  /// Energy after each iteration (only when requested).
  std::vector<double> energy_history;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, SolveReport report)
      : SolverError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct CgOptions {
  double tol = 1e-9;
  std::size_t max_iter = 200000;
  bool record_energy = false;
  /// Starting vector; zero when empty.
  std::vector<double> initial_guess;
};

struct CgResult {
  std::vector<double> x;
  SolveReport report;
};

/// Jacobi-preconditioned conjugate gradients. Stops when ||r|| / ||b|| <= tol.
/// Throws SolverError on a non-positive <p, Mp>; does not throw on
/// non-convergence (report.converged tells).
CgResult conjugate_gradient(const CsrMatrix& matrix, std::span<const double> rhs, const CgOptions& options);

/// Discrete minimiser of 1/2 a(u,u) - (f,u). Throws ConvergenceError if the
/// tolerance is not reached within max_iter.
std::pair<GridFunction, SolveReport> solve_dirichlet(const DiscreteSystem& sys, double tol = 1e-9,
                                                     std::size_t max_iter = 200000);

/// Same for systems with a lift; returns lift + solution on the whole box.
std::pair<LatticeField, SolveReport> solve_system(const DiscreteSystem& sys, const CgOptions& options);

struct ReplacementOptions {
  double tol = 1e-9;
  std::size_t max_iter = 200000;
  /// Starting values on the ball unknowns; u when unset.
  std::optional<LatticeField> start;
};

struct Replacement {
  GridFunction v;
  SolveReport report;
  std::size_t unknowns = 0;
  /// The ball misses the domain; v == u.
  bool empty = false;
};

/// Minimiser of a(w, w) over w with w = u off the mask-true nodes of
/// B(center, r). Throws ConvergenceError like solve_dirichlet.
Replacement polyharmonic_replacement(const EllipticOperator& op, const GridFunction& u, const Point& center,
                                     double r, const ReplacementOptions& options = {});

}  // namespace reiflab
