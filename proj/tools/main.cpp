#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "reiflab/errors.hpp"
#include "reiflab/experiment.hpp"
#include "reiflab/parallel.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 2, kSolver = 3, kVerify = 4 };

struct Args {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory")->required();
  cmd->add_option("--seed", args.seed, "rng seed (overrides the config)");
  cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

int run(const std::string& verb, const Args& args) {
  using namespace reiflab;
  if (args.threads > 0) set_thread_count(args.threads);
  const auto cfg = load_config(args.config, args.seed);
  if (verb == "solve") {
    const auto sol = run_solve(cfg, args.out);
    if (sol.solved)
      std::printf("%s: %zu iterations, residual %.3e, energy %.17g\n", cfg.label.c_str(), sol.report.iterations,
                  sol.report.relative_residual, sol.report.energy);
  } else if (verb == "decay") {
    const auto reps = run_decay(cfg, args.out);
    std::size_t valid = 0;
    for (const auto& r : reps) valid += r.valid();
    std::printf("%s: %zu centers, %zu valid fits\n", cfg.label.c_str(), reps.size(), valid);
  } else if (verb == "holder") {
    for (const auto& r : run_holder(cfg, args.out))
      std::printf("%s: alpha %.4f seminorm %.6g\n", cfg.label.c_str(), r.exponent_estimate, r.seminorm_estimate);
  } else if (verb == "flatness") {
    const auto rep = run_flatness(cfg, args.out);
    std::printf("%s: eps_max %.4f over %zu samples\n", cfg.label.c_str(), rep.eps_max, rep.samples.size());
  } else {
    const auto checks = run_verify(cfg, args.out);
    for (const auto& c : checks)
      std::printf("%-30s %-5s margin %.3e tol %.3e\n", c.name.c_str(), c.verdict.c_str(), c.margin, c.tolerance);
    if (!all_passed(checks)) return kVerify;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reiflab: lattice experiments for higher-order elliptic problems on flat domains"};
  app.require_subcommand(1);
  Args args;
  std::string verb;
  for (const char* name : {"solve", "decay", "holder", "flatness", "verify"}) {
    auto* cmd = app.add_subcommand(name);
    add_common(cmd, args);
    cmd->callback([&verb, name] { verb = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  try {
    return run(verb, args);
  } catch (const reiflab::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const reiflab::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}
