#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "impactflow/impact_model.hpp"
#include "impactflow/levy_noise.hpp"

namespace impactflow {

// ===== Pathwise simulation of the execution state (W, phi, S) =====
//
// The log-price follows
//
//   dX_r = sigma dB_r - mu dr - g(zeta_r) dL_r,      S_r = exp(X_r),
//
// while selling at rate zeta_r accrues cash dW = zeta_r S_r dr and draws down
// holdings dphi = -zeta_r dr.  Random mode samples the impact-clock
// increments dL from the subordinator law; deterministic mode replaces them
// by their mean rate (gamma + alpha1*beta1) dr.

/// Constant market coefficients: b(x) = -mu, sigma(x) = sigma.
struct MarketSpec {
  double sigma = 0.0;  ///< log-price volatility, >= 0 (per sqrt time)
  double mu = 0.0;     ///< downward drift of the log-price, >= 0
  double bound = 16.0; ///< coefficient bound: requires |sigma| + |mu| <= bound

  double mu_tilde() const { return mu - 0.5 * sigma * sigma; }
  void validate() const;

  /// Convenience: build from the risk-adjusted drift mu_tilde = mu - sigma^2/2.
  static MarketSpec from_mu_tilde(double mu_tilde, double sigma, double bound = 16.0);
};

/// Deterministic piecewise-constant liquidation-rate schedule.  rates[i]
/// applies on (edges[i], edges[i+1]] (left-continuous evaluation).
struct Strategy {
  std::vector<double> edges;  ///< m+1 ascending times; edges.front() == 0
  std::vector<double> rates;  ///< m rates, each >= 0

  double horizon() const { return edges.empty() ? 0.0 : edges.back(); }
  double total_sold() const;  ///< integral of the rate over [0, horizon]
  double max_rate() const;

  /// Structural validation (ordering, signs, finiteness).  Admissibility
  /// against a holdings level is checked at simulation time.
  void validate() const;

  static Strategy zero(double horizon);
  static Strategy constant(double rate, double horizon);
  /// Sell amount psi at rate psi/delta on [0, delta], nothing afterwards.
  static Strategy near_block(double psi, double delta, double horizon);
  /// Rates on equal-length intervals spanning [0, horizon].
  static Strategy from_rates(std::vector<double> rates, double horizon);
};

enum class MiMode { random, deterministic };

struct PathResult {
  double terminal_cash;
  double terminal_holdings;
  double terminal_price;
  double min_log_price;  ///< running minimum of X over the grid (diagnostic)
};

/// Static inputs shared by every path of a Monte Carlo run.
struct SimConfig {
  MarketSpec market;
  ImpactSpec impact;
  SubordinatorSpec noise;
  double phi0 = 1.0;
  double s0 = 1.0;
  double w0 = 0.0;
  double horizon = 1.0;
  std::int64_t steps = 500;
  MiMode mode = MiMode::random;

  void validate() const;
};

/// Simulate one path on the uniform grid with `steps` steps.
///
/// Per step: the cash accrual uses the pre-impact left-endpoint price
/// (W += zeta * S * dt before X is advanced), the impact term applies the
/// full sampled increment of L for the step, and the Gaussian and jump draws
/// come from per-(path, step) substreams so that common random numbers across
/// strategy variants line up step by step.
///
/// Throws StrategyError when the strategy is inadmissible for phi0 or has a
/// breakpoint off the step grid.
PathResult simulate_path(const SimConfig& config, const Strategy& strategy,
                         std::uint64_t master_seed, std::uint64_t path_index);

/// As simulate_path, additionally recording the log-price at every grid point
/// (size steps+1, including X_0) and, when cash_increments is non-null, the
/// per-step cash accruals zeta*S*dt (size steps).
PathResult simulate_path_recorded(const SimConfig& config, const Strategy& strategy,
                                  std::uint64_t master_seed, std::uint64_t path_index,
                                  std::vector<double>* log_price,
                                  std::vector<double>* cash_increments = nullptr);

struct McResult {
  double estimate;        ///< sample mean of the utility
  double standard_error;  ///< NaN when paths == 1
  std::int64_t paths;
};

using Utility = std::function<double(double, double, double)>;  // (W, phi, S)

inline double risk_neutral_utility(double w, double /*phi*/, double /*s*/) { return w; }

/// Monte Carlo estimate of E[u(W_t, phi_t, S_t)] over independent paths.
///
/// Per-path utilities are stored by path index and reduced serially with
/// compensated summation, so the result is byte-identical for a fixed master
/// seed regardless of the number of worker threads.  threads = 0 uses all
/// available cores.  When `records` is non-null it receives one PathResult
/// per path.
McResult mc_expected_utility(const SimConfig& config, const Strategy& strategy,
                             const Utility& utility, std::int64_t paths,
                             std::uint64_t master_seed, int threads = 0,
                             std::vector<PathResult>* records = nullptr);

/// Plain sequential implementation kept as the reference for testing the
/// parallel kernel; identical output by construction.
McResult mc_expected_utility_reference(const SimConfig& config, const Strategy& strategy,
                                       const Utility& utility, std::int64_t paths,
                                       std::uint64_t master_seed,
                                       std::vector<PathResult>* records = nullptr);

}  // namespace impactflow
