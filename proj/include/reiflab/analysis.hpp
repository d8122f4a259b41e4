#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reiflab/differences.hpp"
#include "reiflab/grid_function.hpp"

namespace reiflab {

/// Least-squares line through (log r, log E).
struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS deviation of the points from the line in log space.
  double rms = 0.0;
  std::size_t used = 0;
};

/// Points with energy <= floor are skipped. Needs two usable points, else
/// InvalidInput.
PowerFit fit_power_law(std::span<const double> radii, std::span<const double> energies, double floor = 0.0);

struct DecayReport {
  Point center{};
  double R = 0.0;
  double a = 0.5;
  std::vector<double> radii;  // R a^k, k = 0..k_max
  std::vector<double> energies;
  /// NaN unless at least three rungs clear the noise floor.
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;
  std::size_t valid_rungs = 0;
  bool valid() const;
};

struct DecayOptions {
  EnergyMetric metric = EnergyMetric::Euclidean;
  /// Rungs with E <= 10 * noise_floor are left out of the fit.
  double noise_floor = 0.0;
};

/// Local energies on the ladder r_k = R a^k, k = 0..k_max, and the slope of
/// log E against log r. Requires 0 < a < 1 and R a^k_max >= 4h.
DecayReport decay_profile(const EllipticOperator& op, const LatticeField& u, const Point& center, double R,
                          double a, int k_max, const DecayOptions& options = {});

/// Squared Campanato seminorm sampled on the given balls:
/// max over (x, r) of r^{-lambda} h^N sum_{Omega ∩ B(x,r)} |v - mean|^2, the
/// mean taken over the mask-true nodes of the ball. Empty balls are skipped.
double campanato_seminorm(const LatticeField& v, double lambda, std::span<const double> radii,
                          std::span<const Point> centers);

struct HolderOptions {
  std::size_t pair_budget = 200000;
  double min_sep = 0.0;  // defaults to 2h
  double max_sep = 0.0;  // defaults to diameter / 2 (or the local radius)
  int bins = 12;
  double quantile = 0.95;
  std::uint64_t seed = 1;
  /// When set, pairs for distance bin [d, d') are drawn from
  /// Omega ∩ B(center, 2 d'), so the sample stays self-similar around the
  /// centre and a homogeneous singular profile keeps its exponent at every
  /// scale. Otherwise first points are uniform over Omega.
  std::optional<Point> center;
};

struct HolderBin {
  double distance = 0.0;  // geometric mean of sampled pair distances
  double quantile = 0.0;  // upper quantile of |v(x) - v(y)|
  std::size_t pairs = 0;
};

struct HolderReport {
  int derivative_order = 0;
  /// Upper-envelope slope clamped to (0, 1]; NaN when degenerate.
  double exponent_estimate = 0.0;
  double raw_slope = 0.0;
  /// max |v(x) - v(y)| / |x - y|^alpha over the sampled pairs.
  double seminorm_estimate = 0.0;
  /// exp(intercept) of the envelope fit.
  double envelope_constant = 0.0;
  double campanato_lambda = 0.0;
  double campanato_seminorm = 0.0;
  bool degenerate = false;
  std::vector<HolderBin> bins;
};

/// Hölder exponent of v over the mask-true nodes from the upper envelope of
/// log|v(x)-v(y)| against log|x-y|: per geometric distance bin, the
/// `quantile` of the sampled differences; then a least-squares line.
/// Sampling is deterministic in options.seed regardless of thread count.
HolderReport holder_exponent(const LatticeField& v, const HolderOptions& options);

/// Cube Q_r = {|x_i - c_i| <= r}.
struct Cube {
  Point center{};
  double r = 0.0;
};

struct VerticalPoincare {
  double norm_v = 0.0;      // ||v||_{L2(Q_r)}
  double norm_upper = 0.0;  // ||v||_{L2(Q_r^lambda)}
  double norm_dn = 0.0;     // ||D_N v||_{L2(Q_r)}
  double margin = 0.0;      // 4 norm_upper + 3 r norm_dn - norm_v
};

/// Discrete ||v||_Q <= 4 ||v||_{Q^lambda} + 3 r ||d_N v||_Q with
/// Q^lambda = Q ∩ {x_N - c_N > lambda r}, node sums h^N and a forward
/// difference for d_N. Requires 0 < lambda <= 3/4 and Q (plus one node
/// upward) inside the box.
VerticalPoincare check_vertical_poincare(const LatticeField& v, const Cube& cube, double lambda);

struct HalfBallPoincare {
  double hm_norm = 0.0;    // (sum_{k<=m} ||grad^k v||^2)^{1/2}
  double grad_norm = 0.0;  // ||grad^m v||
  double ratio = 0.0;
  bool skipped = false;    // v == 0
};

/// ||v||_{H^m(B(0,radius))} / ||grad^m v||_{L2(B(0,radius))}, node sums over
/// |x| < radius. v must vanish on the lower half of the ball; throws
/// InvalidInput if it does not, or if grad^m v == 0 while v != 0.
HalfBallPoincare check_poincare_halfball(const LatticeField& v, int m, double radius = 1.0);

struct DifferenceBound {
  double exact_norm = 0.0;       // ||d^alpha u||_{L2(Omega)}
  double difference_norm = 0.0;  // ||D_eps^alpha u||_{L2(omega)}
  double margin = 0.0;           // exact_norm - difference_norm
};

/// Omega is the mask; omega keeps the nodes whose l-infinity neighbourhood
/// of `margin_nodes` lies inside Omega. exact_derivative holds samples of
/// d^alpha u. Requires margin_nodes >= |alpha| * |steps|.
DifferenceBound check_difference_bound(const LatticeField& u, const LatticeField& exact_derivative,
                                       const MultiIndex& alpha, int margin_nodes, int steps = 1);

/// The ladder ratio bound (1 / (4 C_A max|a|))^{1/(eta - b)} with
/// C_A = 1 / lambda_min; reported as a diagnostic only.
double admissible_ladder_ratio(const EllipticOperator& op, double eta, double b);

}  // namespace reiflab
