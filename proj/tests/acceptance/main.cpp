// Acceptance suite: one line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "reiflab/analysis.hpp"
#include "reiflab/differences.hpp"
#include "reiflab/errors.hpp"
#include "reiflab/experiment.hpp"

using namespace reiflab;
using nlohmann::json;

namespace {

json preset(const std::string& name) {
  std::ifstream in(std::string(REIFLAB_PRESET_DIR) + "/" + name + ".json");
  if (!in) throw InvalidInput("missing preset " + name);
  return json::parse(in);
}

ExperimentConfig load(const std::string& name, const std::function<void(json&)>& edit = {}) {
  auto doc = preset(name);
  if (edit) edit(doc);
  return parse_config(doc, REIFLAB_PRESET_DIR);
}

struct Line {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double max_error(const LatticeField& u, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.domain().inside(i)) e = std::max(e, std::abs(u[i] - exact(u.domain().position(i)[0])));
  return e;
}

double value_at(const LatticeField& u, double x) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u.domain().position(i)[0] - x) < 1e-12) return u[i];
  return std::numeric_limits<double>::quiet_NaN();
}

double decay_exponent(const ExperimentConfig& cfg) {
  const auto sol = solve_problem(cfg);
  const auto& d = cfg.analysis.at("decay");
  const auto c = decay_centers(cfg);
  DecayOptions opt;
  opt.noise_floor = sol.report.error_energy_bound;
  const auto rep = decay_profile(cfg.op, sol.u, c.at(0), d.at("R").get<double>(), d.at("a").get<double>(),
                                 d.at("k_max").get<int>(), opt);
  return rep.valid() && rep.valid_rungs == rep.radii.size() ? rep.fitted_exponent
                                                            : std::numeric_limits<double>::quiet_NaN();
}

Line criterion1() {
  Line line;
  // Poisson: exact on every grid.
  double worst = 0.0;
  for (const char* h : {"1/16", "1/64", "1/256"}) {
    const auto cfg = load("poisson_1d", [&](json& d) { d["h"] = h; });
    const auto sol = solve_problem(cfg);
    worst = std::max(worst, max_error(sol.u, [](double x) { return x * (1 - x) / 2; }));
  }
  line.check(worst <= 1e-14, fmt("poisson max error %.2e <= 1e-14", worst));
  // Biharmonic: midpoint error and observed order.
  double err[3], mid = 0.0;
  int k = 0;
  for (const char* name : {"biharmonic_1d_h32", "biharmonic_1d_h64", "biharmonic_1d_h128"}) {
    const auto sol = solve_problem(load(name));
    err[k++] = max_error(sol.u, [](double x) { return x * x * (1 - x) * (1 - x); });
    mid = value_at(sol.u, 0.5);
  }
  const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
  line.check(p1 >= 1.0 && p2 >= 1.0, fmt("biharmonic orders %.3f, ", p1) + fmt("%.3f >= 1", p2));
  const double rel = std::abs(mid - 0.0625) / 0.0625;
  line.check(rel <= 0.02, fmt("u(1/2) = %.6f at h=1/128, rel. error %.4f <= 0.02", mid, rel));
  return line;
}

Line criterion2() {
  Line line;
  const double p = decay_exponent(load("interior_disk_linear"));
  line.check(std::abs(p - 2.0) <= 0.05, fmt("interior exponent %.4f, |p - 2| <= 0.05 over 5 rungs", p));
  return line;
}

Line criterion3() {
  Line line;
  const double p2 = decay_exponent(load("halfspace_2d"));
  const double p3 = decay_exponent(load("halfspace_3d"));
  line.check(std::abs(p2 - 2.0) <= 0.05, fmt("N=2 exponent %.4f", p2));
  line.check(std::abs(p3 - 3.0) <= 0.05, fmt("N=3 exponent %.4f (tolerance 0.05)", p3));
  return line;
}

struct KochRun {
  ExperimentConfig cfg;
  Solution sol;
  std::vector<double> exponents;  // sorted, valid fits only
  std::size_t centers = 0;
  double median() const {
    const std::size_t n = exponents.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return n % 2 ? exponents[n / 2] : 0.5 * (exponents[n / 2 - 1] + exponents[n / 2]);
  }
  double min() const { return exponents.empty() ? std::numeric_limits<double>::quiet_NaN() : exponents.front(); }
};

KochRun koch_run(const std::string& name) {
  auto cfg = load(name);
  auto sol = solve_problem(cfg);
  KochRun run{std::move(cfg), std::move(sol), {}, 0};
  const auto& d = run.cfg.analysis.at("decay");
  DecayOptions opt;
  opt.noise_floor = run.sol.report.error_energy_bound;
  const auto centers = decay_centers(run.cfg);
  run.centers = centers.size();
  for (const auto& c : centers) {
    const auto rep = decay_profile(run.cfg.op, run.sol.u, c, d.at("R").get<double>(), d.at("a").get<double>(),
                                   d.at("k_max").get<int>(), opt);
    if (rep.valid()) run.exponents.push_back(rep.fitted_exponent);
  }
  std::sort(run.exponents.begin(), run.exponents.end());
  return run;
}

Line criterion4(const KochRun& k05) {
  Line line;
  const auto k01 = koch_run("koch_biharmonic_delta0.01");
  const auto k20 = koch_run("koch_biharmonic_delta0.2");
  line.check(k05.exponents.size() >= 20 && k05.exponents.size() == k05.centers,
             fmt("%.0f of %.0f centers fitted", static_cast<double>(k05.exponents.size()),
                 static_cast<double>(k05.centers)));
  line.check(k05.min() >= 1.5, fmt("delta=0.05 min exponent %.4f >= 1.5", k05.min()));
  const bool median05 = k05.median() >= 1.8;
  const bool median01 = k01.median() >= 1.8 && k01.min() >= 1.5;
  line.check(median05 || median01, fmt("median %.4f (delta=0.05), ", k05.median()) +
                                       fmt("%.4f (delta=0.01) >= 1.8 at one of them", k01.median()));
  line.check(k01.min() >= k20.min() - 0.05,
             fmt("trend: min exponent %.4f (delta=0.01) >= %.4f (delta=0.2) - 0.05", k01.min(), k20.min()));
  line.check(k05.sol.report.relative_residual <= k05.cfg.tol,
             fmt("solver residual %.2e <= %.0e", k05.sol.report.relative_residual, k05.cfg.tol));
  return line;
}

Line criterion5() {
  Line line;
  const auto cfg = load("cone_singular");
  const auto sol = solve_problem(cfg);
  const auto& hs = cfg.analysis.at("holder");
  HolderOptions opt;
  opt.seed = cfg.seed;
  opt.center = Point{0, 0, 0};
  opt.max_sep = hs.at("max_sep").get<double>();
  opt.pair_budget = hs.at("pair_budget").get<std::size_t>();
  const auto rep = holder_exponent(sol.u, opt);
  const double a = rep.exponent_estimate;
  line.check(std::abs(a - 2.0 / 3.0) <= 0.07, fmt("apex Hoelder exponent %.4f, |alpha - 2/3| <= 0.07", a));
  line.check(rep.raw_slope < 1.0, fmt("raw envelope slope %.4f < 1", rep.raw_slope));
  return line;
}

const VerifyCheck& find(const std::vector<VerifyCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InvalidInput("missing check " + name);
}

Line criterion6(const std::vector<VerifyCheck>& suite) {
  Line line;
  const auto& dual = find(suite, "duality_residual");
  line.check(dual.margin <= 1e-13, fmt("duality residual %.2e <= 1e-13", dual.margin));
  const auto& sym = find(suite, "matrix_symmetry_residual");
  line.check(sym.margin == 0.0, fmt("matrix asymmetry %.2e == 0", sym.margin));
  const auto& pyth = find(suite, "pythagoras_residual");
  line.check(pyth.margin <= 1e-8, fmt("Pythagoras residual %.2e <= 1e-8 over 10 pairs", pyth.margin));
  const auto& rec = find(suite, "decomposition_residual");
  line.check(rec.margin == 0.0, fmt("decomposition residual %.2e == 0", rec.margin));
  const auto& ell = find(suite, "decomposition_ellipticity");
  line.check(ell.margin >= -1e-12, fmt("min ell(D) - ell(A) = %.2e >= -1e-12 over 50 operators", ell.margin));
  const auto bad = verify_suite(load("verify_corrupted_operator"));
  const auto& neg = find(bad, "operator_symmetry_residual");
  line.check(neg.verdict == "FAIL" && !all_passed(bad), "corrupted coefficients fail the symmetry check");
  return line;
}

Line criterion7(const std::vector<VerifyCheck>& suite) {
  Line line;
  const auto& vp = find(suite, "vertical_poincare");
  line.check(vp.margin >= -5.0, fmt("vertical Poincare min margin / (h ||v||) = %.3f >= -5", vp.margin));
  const auto& db = find(suite, "difference_bound");
  line.check(db.margin >= -10.0, fmt("difference bound min margin / (h ||d u||) = %.3f >= -10", db.margin));
  const auto& hb = find(suite, "poincare_halfball_stability");
  line.check(hb.margin >= 0.0, fmt("half-ball constant drift %.4f <= 0.1", 0.1 - hb.margin));
  return line;
}

Line criterion8(const KochRun& k05) {
  Line line;
  const auto& cfg = k05.cfg;
  const auto& dom = *cfg.dom;
  const auto targets = holder_targets(cfg, k05.sol.u);
  HolderOptions opt;
  opt.seed = cfg.seed;
  const auto& hs = cfg.analysis.at("holder");
  const double s = hs.at("min_sep").get<double>();
  opt.min_sep = s;
  opt.max_sep = hs.at("max_sep").get<double>();
  opt.pair_budget = hs.at("pair_budget").get<std::size_t>();
  // Seeded Campanato centres shared by both radius sets.
  std::vector<Point> centers;
  {
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < dom.node_count(); ++i)
      if (dom.inside(i)) inside.push_back(i);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
    for (int k = 0; k < 64; ++k) centers.push_back(dom.position(inside[pick(rng)]));
  }
  const auto radii_from = [&](double lo) {
    std::vector<double> r;
    for (double x = lo; x <= opt.max_sep * (1 + 1e-12); x *= 2.0) r.push_back(x);
    return r;
  };
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto rep = holder_exponent(targets[i], opt);
    const double a = rep.exponent_estimate;
    const std::string tag = "d_" + std::to_string(i + 1) + "u: ";
    line.check(a >= 0.5 && std::isfinite(rep.seminorm_estimate),
               tag + fmt("alpha %.4f >= 0.5, seminorm %.4g finite", a, rep.seminorm_estimate));
    const double lambda = 2.0 + 2.0 * a;
    const auto r1 = radii_from(s), r2 = radii_from(s / 2.0);
    const double c1 = std::sqrt(campanato_seminorm(targets[i], lambda, r1, centers));
    const double c2 = std::sqrt(campanato_seminorm(targets[i], lambda, r2, centers));
    const double drift = std::abs(c2 / c1 - 1.0);
    line.check(std::isfinite(c1) && std::isfinite(c2) && drift <= 0.2,
               tag + fmt("Campanato %.4g -> %.4g", c1, c2) + fmt(" under halved min_sep (drift %.3f <= 0.2)", drift));
  }
  return line;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int k, const std::function<Line()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Line line;
    try {
      line = run();
    } catch (const std::exception& e) {
      line.pass = false;
      line.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s  (%.1f s)\n", k, line.pass ? "PASS" : "FAIL", line.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !line.pass;
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  std::vector<VerifyCheck> suite;
  std::optional<KochRun> k05;
  try {
    k05 = koch_run("koch_biharmonic_delta0.05");
  } catch (const std::exception& e) {
    std::printf("koch delta=0.05 run failed: %s\n", e.what());
  }
  report(4, [&] {
    if (!k05) throw SolverError("no solution");
    return criterion4(*k05);
  });
  report(5, criterion5);
  report(6, [&] {
    suite = verify_suite(load("verify_polyharmonic_2_2"));
    return criterion6(suite);
  });
  report(7, [&] { return criterion7(suite); });
  report(8, [&] {
    if (!k05) throw SolverError("no solution");
    return criterion8(*k05);
  });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}
