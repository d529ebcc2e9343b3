#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "impactflow/config.hpp"
#include "impactflow/csv.hpp"
#include "impactflow/dp_solver.hpp"
#include "impactflow/errors.hpp"
#include "impactflow/experiments.hpp"
#include "impactflow/impact_model.hpp"
#include "impactflow/market_sim.hpp"
#include "impactflow/version.hpp"

namespace {

using namespace impactflow;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all cores
};

int resolve_thread_request(const CLI::Option* flag, int flag_value) {
  if (flag->count() > 0) return flag_value;
  if (const char* env = std::getenv("IMPACTFLOW_THREADS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return parsed;
    } catch (const std::exception&) {
      throw ConfigError("IMPACTFLOW_THREADS is not a positive integer: '" + std::string(env) +
                        "'");
    }
    throw ConfigError("IMPACTFLOW_THREADS is not a positive integer: '" + std::string(env) +
                      "'");
  }
  return 0;
}

RunConfig load_config(const GlobalOptions& options) {
  if (options.config_path.empty()) return RunConfig{};
  return parse_config_file(options.config_path);
}

std::string out_path(const GlobalOptions& options, const std::string& file) {
  return (std::filesystem::path(options.out_dir) / file).string();
}

int cmd_solve(const GlobalOptions& options) {
  const RunConfig config = load_config(options);
  std::filesystem::create_directories(options.out_dir);
  const std::uint64_t hash = config.hash();

  if (config.phi0 == 0.0) {
    // Degenerate problem: nothing to sell, value is the cash in hand.
    CsvWriter values(out_path(options, "values.csv"), {"k", "phi", "f", "psi_star"}, hash,
                     options.seed);
    values.row({0.0, 0.0, 0.0, 0.0});
    values.close();
    CsvWriter strategy(out_path(options, "strategy.csv"), {"t", "zeta", "phi"}, hash,
                       options.seed);
    strategy.close();
    std::cout << "f(" << format_double(config.horizon) << ", 0) = 0\n";
    std::cout << "value = " << format_double(config.w) << "\n";
    std::cout << "tc = n/a\n";
    return 0;
  }

  const DpParams params = config.dp_params();
  const DpSolution sol = solve(params, options.threads);
  const ExtractedStrategy strat = extract_strategy(sol, config.phi0);

  {
    CsvWriter values(out_path(options, "values.csv"), {"k", "phi", "f", "psi_star"}, hash,
                     options.seed);
    const std::int64_t stride =
        config.values_stride > 0 ? config.values_stride
                                 : std::max<std::int64_t>(1, params.k_max / 50);
    const std::int64_t jstride =
        config.values_stride > 0 ? config.values_stride
                                 : std::max<std::int64_t>(1, sol.grid_m / 50);
    for (std::int64_t k = 0; k <= params.k_max; k += stride) {
      for (std::int64_t j = 0; j <= sol.grid_m; j += jstride) {
        values.row({static_cast<double>(k), sol.phi[static_cast<std::size_t>(j)],
                    sol.node_value(k, j), sol.node_policy(k, j)});
      }
    }
    values.close();
  }
  {
    CsvWriter strategy(out_path(options, "strategy.csv"), {"t", "zeta", "phi"}, hash,
                       options.seed);
    for (std::int64_t l = 0; l < params.k_max; ++l) {
      const auto i = static_cast<std::size_t>(l);
      strategy.row({strat.time[i], strat.rate[i], strat.holdings[i]});
    }
    strategy.close();
  }

  const double t = static_cast<double>(params.k_max) / static_cast<double>(params.n);
  const double f_val = sol.value_at(params.k_max, config.phi0);
  std::cout << "f(" << format_double(t) << ", " << format_double(config.phi0)
            << ") = " << format_double(f_val) << "\n";
  std::cout << "value = " << format_double(config.w + config.s * f_val) << "\n";
  if (f_val > 0.0) {
    std::cout << "tc = " << format_double(total_mi_cost(f_val, config.phi0, 1.0)) << "\n";
  } else {
    std::cout << "tc = n/a\n";
  }
  return 0;
}

int cmd_simulate(const GlobalOptions& options) {
  const RunConfig config = load_config(options);
  const SimConfig sim = config.sim_config();
  const Strategy strategy = config.strategy();
  const McResult mc = mc_expected_utility(sim, strategy, risk_neutral_utility, config.paths,
                                          options.seed, options.threads);

  std::cout << "estimate = " << format_double(mc.estimate) << "\n";
  if (mc.paths > 1) {
    std::cout << "se = " << format_double(mc.standard_error) << "\n";
  } else {
    std::cout << "se = n/a\n";
  }
  std::cout << "paths = " << mc.paths << "\n";
  std::cout << "seed = " << options.seed << "\n";

  if (config.p == 1 && config.strategy_kind == "near-block") {
    // The instantaneous-sale limit has a closed form under linear impact.
    const double closed =
        config.w +
        config.s * decayed_proceeds(config.strategy_psi, config.noise.gamma * config.alpha0);
    std::cout << "closed_form = " << format_double(closed) << "\n";
    const double dev = std::fabs(mc.estimate - closed);
    std::cout << "abs_dev = " << format_double(dev) << "\n";
    if (mc.paths > 1) {
      std::cout << "within_3se = " << (dev <= 3.0 * mc.standard_error ? "yes" : "no") << "\n";
    } else {
      std::cout << "within_3se = n/a\n";
    }
  }
  return 0;
}

int cmd_reproduce(const GlobalOptions& options, const std::string& scenario, bool plots,
                  std::int64_t paths) {
  ScenarioRequest request;
  request.name = scenario;
  request.out_dir = options.out_dir;
  request.seed = options.seed;
  request.threads = options.threads;
  request.plots = plots;
  request.paths = paths;
  const ScenarioResult result = run_scenario(request);
  std::cout << "scenario " << result.name << "\n";
  for (const std::string& line : result.summary) std::cout << line << "\n";
  for (const std::string& file : result.files) std::cout << "wrote " << file << "\n";
  return 0;
}

int cmd_compare(const GlobalOptions& options, int count, std::int64_t paths) {
  const RunConfig config = load_config(options);
  SimConfig base = config.sim_config();
  if (base.impact.p != 2) {
    throw ConfigError("compare requires quadratic impact (impact.p = 2)");
  }
  std::filesystem::create_directories(options.out_dir);
  const auto strategies =
      random_strategy_suite(count, base.phi0, base.horizon, options.seed);
  const auto rows =
      compare_random_vs_deterministic(strategies, base, paths, options.seed, options.threads);

  CsvWriter csv(out_path(options, "comparison.csv"),
                {"index", "mc_random", "mc_random_se", "deterministic_value", "margin",
                 "holds"},
                config.hash(), options.seed);
  int holding = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& r = rows[i];
    csv.row({static_cast<double>(i), r.mc_random, r.mc_random_se, r.deterministic_value,
             r.mc_random + 3.0 * r.mc_random_se - r.deterministic_value,
             r.inequality_holds ? 1.0 : 0.0});
    if (r.inequality_holds) ++holding;
  }
  csv.close();
  std::cout << "noisy-clock value >= averaged-clock value for " << holding << "/"
            << rows.size() << " strategies\n";
  std::cout << "wrote " << out_path(options, "comparison.csv") << "\n";
  return holding == static_cast<int>(rows.size()) ? 0 : 1;
}

int cmd_closed_form(const GlobalOptions& options) {
  const RunConfig config = load_config(options);
  const double value =
      linear_impact_value(config.w, config.phi0, config.s, config.noise.gamma, config.alpha0);
  std::cout << "linear_impact_value(phi=" << format_double(config.phi0)
            << ") = " << format_double(value) << "\n";
  if (config.phi0 > 0.0 && value - config.w > 0.0) {
    std::cout << "tc = " << format_double(total_mi_cost(value - config.w, config.phi0, config.s))
              << "\n";
  } else {
    std::cout << "tc = n/a\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               ": optimal trade execution under uncertain market impact"};
  app.require_subcommand(1);

  GlobalOptions options;
  int threads_flag = 0;
  const CLI::Option* threads_opt =
      app.add_option("--threads", threads_flag, "worker threads (default: all cores)")
          ->check(CLI::PositiveNumber);
  app.add_option("--config", options.config_path, "configuration file");
  app.add_option("--out", options.out_dir, "output directory (default: .)");
  app.add_option("--seed", options.seed, "master random seed (default: 1)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve the dynamic program");
  solve_cmd->fallthrough();
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo expected proceeds of a strategy");
  simulate_cmd->fallthrough();
  CLI::App* reproduce_cmd =
      app.add_subcommand("reproduce", "run a named reproduction scenario");
  reproduce_cmd->fallthrough();
  std::string scenario;
  bool plots = false;
  std::int64_t scenario_paths = 0;
  reproduce_cmd->add_option("scenario", scenario, "scenario name")->required();
  reproduce_cmd->add_flag("--plots", plots, "also write SVG plots");
  reproduce_cmd->add_option("--paths", scenario_paths,
                            "Monte Carlo path override (0 = scenario default)");
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "random strategies: noisy-clock vs averaged-clock values");
  compare_cmd->fallthrough();
  int compare_count = 50;
  std::int64_t compare_paths = 20000;
  compare_cmd->add_option("--count", compare_count, "number of random strategies")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--paths", compare_paths, "Monte Carlo paths per strategy")
      ->check(CLI::PositiveNumber);
  CLI::App* closed_cmd =
      app.add_subcommand("closed-form", "linear-impact closed-form value");
  closed_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    options.threads = resolve_thread_request(threads_opt, threads_flag);
    if (solve_cmd->parsed()) return cmd_solve(options);
    if (simulate_cmd->parsed()) return cmd_simulate(options);
    if (reproduce_cmd->parsed()) return cmd_reproduce(options, scenario, plots, scenario_paths);
    if (compare_cmd->parsed()) return cmd_compare(options, compare_count, compare_paths);
    if (closed_cmd->parsed()) return cmd_closed_form(options);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const UnknownScenarioError& e) {
    std::cerr << "error: " << e.what() << "\nknown scenarios:\n";
    for (const std::string& name : e.known) std::cerr << "  " << name << "\n";
    return 5;
  } catch (const StrategyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DriftConditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
