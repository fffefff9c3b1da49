// Command-line front end: seeded benchmark runs, comparisons, parameter
// tuning, and the doubling-trick driver. All file output is byte-deterministic
// for a fixed command line; timing goes to stderr only.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ocolt/config.hpp"
#include "ocolt/diagnostics.hpp"
#include "ocolt/harness.hpp"
#include "ocolt/trace_io.hpp"
#include "ocolt/tuner.hpp"

namespace {

using namespace ocolt;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemInstance make_instance(const RunConfig& cfg, int* attempts) {
  if (cfg.instance) return instance_from_config(*cfg.instance);
  return generate_instance(cfg.seed, cfg.n, cfg.m, attempts);
}

// Fail before any heavy computation if results could not be written anyway.
void ensure_writable(const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw ConfigError("output directory not creatable: " + out_dir + " (" +
                      ec.message() + ")");
  const fs::path probe = fs::path(out_dir) / ".write_probe";
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out)
      throw ConfigError("output directory not writable: " + out_dir);
  }
  fs::remove(probe, ec);
}

AlgorithmSpec make_spec(const RunConfig& cfg, const ProblemInstance& inst,
                        long T) {
  AlgorithmSpec spec = AlgorithmSpec::parse(cfg.algorithm, cfg.theta_exp);
  if (spec.kind == AlgorithmSpec::Kind::vq &&
      (cfg.gamma || cfg.alpha || cfg.eta)) {
    AlgorithmParams p = default_schedule(T, inst.beta);
    if (cfg.gamma) p.gamma = *cfg.gamma;
    if (cfg.eta) p.eta = *cfg.eta;
    if (cfg.alpha) p.alpha = *cfg.alpha;
    p.horizon = T;
    p.require_valid_for(inst.beta);
    spec.params_override = p;
  }
  return spec;
}

int cmd_run(const RunConfig& cfg) {
  ensure_writable(cfg.out_dir);
  int attempts = 1;
  ProblemInstance inst = make_instance(cfg, &attempts);
  CostGenerator gen(cfg.seed, cfg.T, inst.n());
  const AlgorithmSpec spec = make_spec(cfg, inst, cfg.T);
  RunResult result = run_benchmark(spec, inst, gen);
  result.manifest.instance_attempts = attempts;
  ProblemInstance reported = inst;
  reported.D = gen.grad_bound();

  const std::string prefix =
      spec.label() + "_seed" + std::to_string(cfg.seed);
  const auto files =
      emit_run_outputs(result, reported, cfg.out_dir, prefix, cfg.plots);
  std::cout << "algorithm=" << spec.label() << " seed=" << cfg.seed
            << " T=" << cfg.T << " final_regret="
            << fmt_double(result.final_regret()) << " final_max_violation="
            << fmt_double(result.final_max_violation()) << "\n";
  for (const auto& [k, v] : result.manifest.bounds)
    std::cout << "bound " << k << "=" << fmt_double(v) << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  std::cerr << "wall_ms=" << result.wall_ms << "\n";
  return 0;
}

std::vector<AlgorithmSpec> comparison_battery(const RunConfig& cfg) {
  std::vector<AlgorithmSpec> algos;
  algos.push_back(AlgorithmSpec::parse("vq", 0.5));
  algos.push_back(AlgorithmSpec::parse("ogd-proj", 0.5));
  for (const double theta : cfg.compare_theta_exps)
    algos.push_back(AlgorithmSpec::parse("primal-dual", theta));
  return algos;
}

int cmd_compare(const RunConfig& cfg) {
  ensure_writable(cfg.out_dir);
  const auto algos = comparison_battery(cfg);
  const ComparisonTable table =
      compare(algos, cfg.T, cfg.effective_seeds(), cfg.n, cfg.m);
  const auto files = emit_comparison_outputs(table, cfg.out_dir, cfg.plots);
  for (const auto& cell : table.cells) {
    std::cout << "seed=" << cell.seed << " algorithm=" << cell.algorithm;
    if (cell.ok) {
      std::cout << " final_regret=" << fmt_double(cell.result.final_regret())
                << " final_max_violation="
                << fmt_double(cell.result.final_max_violation()) << "\n";
    } else {
      std::cout << " error=" << cell.error << "\n";
    }
  }
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

int cmd_tune(const RunConfig& cfg) {
  ensure_writable(cfg.out_dir);
  TunerProblem problem;
  if (cfg.tune_mode == "minimax") {
    problem.mode = TunerProblem::Mode::minimax;
  } else if (cfg.tune_mode == "regret-subject-to-violation") {
    problem.mode = TunerProblem::Mode::regret_subject_to_violation;
  } else {
    problem.mode = TunerProblem::Mode::violation_subject_to_regret;
  }
  problem.cap = cfg.cap;

  int attempts = 1;
  const ProblemInstance inst = make_instance(cfg, &attempts);
  const CostGenerator gen(cfg.seed, cfg.T, inst.n());
  problem.constants = {gen.grad_bound(), inst.G, inst.R, inst.beta,
                       inst.epsilon, cfg.T};

  const TuneResult r = tune(problem);
  const BoundPair bounds =
      evaluate_bounds(r.gamma, r.eta, r.alpha, problem.constants, cfg.T);

  // Oracle-gap diagnostic: dense 200x200 log grid with alpha eliminated at
  // its lower bound, restricted to each mode's feasible cells.
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      const double gamma = std::pow(10.0, -2.0 + 5.0 * i / 199.0);
      const double eta = std::pow(10.0, -2.0 + 5.0 * j / 199.0);
      const double alpha =
          0.5 * (problem.constants.beta * problem.constants.beta * gamma *
                     gamma +
                 eta);
      const BoundPair bp =
          evaluate_bounds(gamma, eta, alpha, problem.constants, cfg.T);
      switch (problem.mode) {
        case TunerProblem::Mode::minimax:
          grid_best =
              std::min(grid_best, std::max(bp.regret_program, bp.violation));
          break;
        case TunerProblem::Mode::regret_subject_to_violation:
          if (bp.violation <= *problem.cap)
            grid_best = std::min(grid_best, bp.regret_program);
          break;
        case TunerProblem::Mode::violation_subject_to_regret:
          if (bp.regret_program <= *problem.cap)
            grid_best = std::min(grid_best, bp.violation);
          break;
      }
    }
  }

  nlohmann::json out;
  out["mode"] = cfg.tune_mode;
  out["constants"] = {{"D", problem.constants.D},
                      {"G", problem.constants.G},
                      {"R", problem.constants.R},
                      {"beta", problem.constants.beta},
                      {"epsilon", problem.constants.epsilon},
                      {"T", cfg.T}};
  out["gamma"] = r.gamma;
  out["eta"] = r.eta;
  out["alpha"] = r.alpha;
  out["objective"] = r.objective;
  out["regret_bound_program"] = bounds.regret_program;
  out["regret_bound_certified"] = bounds.regret_certified;
  out["violation_bound"] = bounds.violation;
  if (std::isfinite(grid_best)) {
    out["grid_objective"] = grid_best;
    out["oracle_gap"] = r.objective / grid_best - 1.0;
  }
  if (cfg.cap) out["cap"] = *cfg.cap;

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) /
                    ("tune_seed" + std::to_string(cfg.seed) + ".json");
  write_file(path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_doubling(const RunConfig& cfg) {
  ensure_writable(cfg.out_dir);
  int attempts = 1;
  ProblemInstance inst = make_instance(cfg, &attempts);
  CostGenerator gen(cfg.seed, cfg.T, inst.n());
  inst.D = gen.grad_bound();
  const LossOracle losses = gen.oracle();

  DoublingResult dres = run_doubling(inst, losses, inst.beta, cfg.T);
  const Hindsight hs = hindsight_optimum(inst, gen.cost_sum());
  RunResult result = compute_metrics(std::move(dres.trace), inst, hs, losses);

  Manifest man;
  man.seed = cfg.seed;
  man.T = cfg.T;
  man.n = inst.n();
  man.m = inst.m();
  man.algorithm = "vq-doubling";
  man.instance_attempts = attempts;
  double violation_bound_sum = 0.0;
  double max_period_c = 0.0;
  for (const PeriodInfo& p : dres.periods) {
    violation_bound_sum += certified_violation_bound(inst, p.params);
    const double c = certified_regret_bound(inst, p.params, p.horizon) /
                     std::sqrt(static_cast<double>(p.horizon));
    max_period_c = std::max(max_period_c, c);
  }
  man.parameters = {{"periods", static_cast<double>(dres.periods.size())},
                    {"stop_round", static_cast<double>(cfg.T)}};
  man.constants = {{"D", inst.D},
                   {"beta", inst.beta},
                   {"G", inst.G},
                   {"R", inst.R},
                   {"epsilon", inst.epsilon}};
  man.bounds = {{"violation_sum_of_periods", violation_bound_sum},
                {"regret_doubling",
                 2.0 * max_period_c / (std::sqrt(2.0) - 1.0) *
                     std::sqrt(static_cast<double>(cfg.T))}};
  result.manifest = man;

  const std::string prefix = "doubling_seed" + std::to_string(cfg.seed);
  const auto files =
      emit_run_outputs(result, inst, cfg.out_dir, prefix, cfg.plots);
  std::cout << "doubling seed=" << cfg.seed << " stop_round=" << cfg.T
            << " periods=" << dres.periods.size()
            << " final_regret=" << fmt_double(result.final_regret())
            << " final_max_violation="
            << fmt_double(result.final_max_violation()) << "\n";
  for (const auto& [k, v] : result.manifest.bounds)
    std::cout << "bound " << k << "=" << fmt_double(v) << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online convex optimization with long-term constraints"};
  app.require_subcommand(0, 1);
  app.fallthrough(true);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<long> T_flag;
  std::optional<std::string> out_flag, algorithm_flag;
  std::optional<double> theta_flag;
  bool no_plots = false;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed_flag, "master seed");
  app.add_option("--T", T_flag, "horizon (stop round for doubling)");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--algorithm", algorithm_flag,
                 "vq | ogd-proj | primal-dual");
  app.add_option("--theta-exp", theta_flag,
                 "trade-off exponent of the primal-dual baseline");
  app.add_flag("--no-plots", no_plots, "skip SVG emission");

  auto* sub_run = app.add_subcommand("run", "single seeded run");
  auto* sub_compare = app.add_subcommand("compare", "one battery per seed");
  auto* sub_tune = app.add_subcommand("tune", "solve the parameter program");
  auto* sub_replicate =
      app.add_subcommand("replicate-paper", "benchmark comparison battery");
  auto* sub_doubling =
      app.add_subcommand("doubling", "doubling-trick run, unknown horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(read_file(config_path));
    if (sub_run->parsed()) cfg.command = "run";
    if (sub_compare->parsed()) cfg.command = "compare";
    if (sub_tune->parsed()) cfg.command = "tune";
    if (sub_replicate->parsed()) cfg.command = "replicate-paper";
    if (sub_doubling->parsed()) cfg.command = "doubling";
    if (seed_flag) {
      cfg.seed = *seed_flag;
      cfg.seeds.clear();
    }
    if (T_flag) cfg.T = *T_flag;
    if (out_flag) cfg.out_dir = *out_flag;
    if (algorithm_flag) cfg.algorithm = *algorithm_flag;
    if (theta_flag) cfg.theta_exp = *theta_flag;
    if (no_plots) cfg.plots = false;
    validate_config(cfg);

    if (cfg.command == "run") return cmd_run(cfg);
    if (cfg.command == "compare" || cfg.command == "replicate-paper")
      return cmd_compare(cfg);
    if (cfg.command == "tune") return cmd_tune(cfg);
    if (cfg.command == "doubling") return cmd_doubling(cfg);
    throw ConfigError("no command given; use run, compare, tune, "
                      "replicate-paper or doubling");
  } catch (const SlaterViolationError& e) {
    std::cerr << "slater violation: " << e.what() << "\n";
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
