#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "impactflow/dp_solver.hpp"
#include "impactflow/market_sim.hpp"

namespace impactflow {

// ===== Named reproduction scenarios =====
//
// Base parameters shared by every scenario: alpha0 = 0.01, horizon t = 1,
// mu_tilde = 0.05, w = 0, s = 1, n = 500.  The fixed-gamma family keeps
// gamma = 1, beta1 = 2 and varies alpha1 in {0, 1, 3}; the fixed-gamma-tilde
// family holds the mean rate gamma + alpha1*beta1 = 1 and the variance rate
// alpha1*beta1^2 = 0.5 while varying alpha1 in {0, 0.5, 1}.

struct FixedGammaTilde {
  double gamma;
  double beta1;
};

/// Solve gamma + alpha1*beta1 = 1, alpha1*beta1^2 = 0.5 for (gamma, beta1).
/// Requires alpha1 > 0; rejects alpha1 large enough to force gamma < 0
/// (gamma = 0 itself is accepted, downstream gates decide its fate).
FixedGammaTilde resolve_fixed_gamma_tilde(double alpha1);

/// Shape classification of an execution-rate path.  The active region is
/// the set of cells with rate above 1e-6 times the peak rate.
struct RateShape {
  bool constant_speed;    ///< CoV < 5% over the active region minus its two boundary cells
  bool increasing_speed;  ///< last active rate >= 1.10 * first active rate
  double cov;
  double first_active;
  double last_active;
};
RateShape classify_rates(const std::vector<double>& rates);

/// Random admissible piecewise-constant strategies: 10 equal intervals with
/// rates uniform on [0, 2*phi0/horizon], rescaled when the total sale would
/// exceed phi0.  Deterministic in (count, seed).
std::vector<Strategy> random_strategy_suite(int count, double phi0, double horizon,
                                            std::uint64_t seed);

/// Strategy pairs ordered by rate: slower.rates[i] = u_i * faster.rates[i]
/// with u_i uniform on (0, 1), so the slower strategy never sells faster.
struct StrategyPair {
  Strategy slower;
  Strategy faster;
};
std::vector<StrategyPair> random_dominated_pairs(int count, double phi0, double horizon,
                                                 std::uint64_t seed);

/// Noisy-clock versus averaged-clock comparison for the risk-neutral trader.
/// The random side is a Monte Carlo estimate; the deterministic side replaces
/// the impact clock by its mean rate, whose expectation is computed exactly
/// by one noise-free path (sigma = 0, drift mu_tilde).
struct ComparisonRow {
  double mc_random;
  double mc_random_se;
  double deterministic_value;
  bool inequality_holds;  ///< mc_random + 3 * se >= deterministic_value
};
std::vector<ComparisonRow> compare_random_vs_deterministic(
    const std::vector<Strategy>& strategies, const SimConfig& base, std::int64_t paths,
    std::uint64_t seed, int threads = 0);

struct ScenarioRequest {
  std::string name;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 0;
  bool plots = false;
  std::int64_t paths = 0;  ///< Monte Carlo path override; 0 keeps the scenario default
};

struct ScenarioResult {
  std::string name;
  std::vector<std::string> files;    ///< paths of everything written
  std::vector<std::string> summary;  ///< one line per reported quantity or check
};

std::vector<std::string> scenario_names();

/// Run one registered scenario, writing its CSV (and optional SVG) artifacts
/// under request.out_dir.  Outputs are byte-identical for a fixed seed and
/// any thread count.  Throws UnknownScenarioError for unregistered names.
ScenarioResult run_scenario(const ScenarioRequest& request);

}  // namespace impactflow
