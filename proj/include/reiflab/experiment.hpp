#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reiflab/analysis.hpp"
#include "reiflab/elliptic_operator.hpp"
#include "reiflab/geometry.hpp"
#include "reiflab/solver.hpp"

namespace reiflab {

/// Everything a run needs, validated. See README for the JSON layout.
struct ExperimentConfig {
  std::string label;
  EllipticOperator op = EllipticOperator::polyharmonic(1, 1);
  /// The operator as written in the config; may be asymmetric (verify only).
  bool operator_valid = true;
  DomainPtr dom;
  std::function<double(const Point&)> source;
  std::optional<LatticeField> source_field;
  /// Values pinned off the unknown set; zero Dirichlet data when unset.
  std::function<double(const Point&)> boundary_data;
  /// Replaces the solve with a sampled function (restricted to the mask).
  std::function<double(const Point&)> field;
  /// A previously written solution raster; analyses reuse it instead of solving.
  std::optional<LatticeField> prior_solution;
  double tol = 1e-9;
  std::size_t max_iter = 200000;
  nlohmann::json analysis = nlohmann::json::object();
  std::uint64_t seed = 1;
};

/// Relative paths inside the config resolve against base_dir. A seed given
/// here overrides the config's. Throws InvalidInput naming the bad field.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

struct Solution {
  /// Solution on the whole box; off the mask it holds the boundary data.
  LatticeField u;
  SolveReport report;
  bool solved = false;
};

/// Assembles and solves the configured problem (or samples `field`).
/// Throws ConvergenceError when the tolerance is not met.
Solution solve_problem(const ExperimentConfig& cfg);

/// The components analysed by the holder verb: u for m = 1, otherwise the
/// iterated differences D^alpha u for |alpha| = m - 1 in enumeration order.
std::vector<LatticeField> holder_targets(const ExperimentConfig& cfg, const LatticeField& u);

/// Decay centres from analysis.decay: explicit "centers" plus
/// "boundary_centers" seeded boundary nodes (in node order).
std::vector<Point> decay_centers(const ExperimentConfig& cfg);

struct VerifyCheck {
  std::string name;
  double margin = 0.0;
  double tolerance = 0.0;
  /// PASS, FAIL or SKIP (a prerequisite failed).
  std::string verdict;
};

/// Identity and inequality suite for the configured operator and domain.
/// Names ending in "_residual" pass when |margin| <= tolerance, the others
/// when margin >= -tolerance.
std::vector<VerifyCheck> verify_suite(const ExperimentConfig& cfg);
bool all_passed(const std::vector<VerifyCheck>& checks);

// CLI verbs. Each writes its CSV files into out_dir (created if missing).
Solution run_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
std::vector<DecayReport> run_decay(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
std::vector<HolderReport> run_holder(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
FlatnessReport run_flatness(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
std::vector<VerifyCheck> run_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace reiflab
