#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "impactflow/errors.hpp"
#include "impactflow/market_sim.hpp"

using namespace impactflow;

namespace {

SimConfig base_config() {
  SimConfig config;
  config.market = MarketSpec::from_mu_tilde(0.05, 0.1);
  config.impact = ImpactSpec{2, 0.01};
  config.noise = SubordinatorSpec{1.0, 1.0, 2.0};
  config.phi0 = 2.0;
  config.s0 = 1.0;
  config.w0 = 0.0;
  config.horizon = 1.0;
  config.steps = 100;
  config.mode = MiMode::random;
  return config;
}

// Exact expectation of the terminal cash of the discrete scheme, obtained by
// factorizing E[S_k] = s0 * exp(-mu_tilde*k*dt) * prod_j exp(-psi_L(g_j)*dt)
// over the steps before k.  Independent of the simulator internals.
double exact_discrete_mean_cash(const SimConfig& config, const std::vector<double>& step_rates) {
  const double dt = config.horizon / static_cast<double>(config.steps);
  const double mu_tilde = config.market.mu_tilde();
  double log_mean_price = std::log(config.s0);
  double cash = config.w0;
  for (std::int64_t k = 0; k < config.steps; ++k) {
    const double rate = step_rates[static_cast<std::size_t>(k)];
    cash += rate * dt * std::exp(log_mean_price);
    const double g = config.impact.g(rate);
    log_mean_price -= (mu_tilde + laplace_exponent(config.noise, g)) * dt;
  }
  return cash;
}

std::vector<double> rates_per_step(const Strategy& strategy, std::int64_t steps) {
  std::vector<double> out(static_cast<std::size_t>(steps), 0.0);
  const double dt = strategy.horizon() / static_cast<double>(steps);
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    for (std::size_t i = 0; i < strategy.rates.size(); ++i) {
      if (t > strategy.edges[i] && t <= strategy.edges[i + 1]) {
        out[static_cast<std::size_t>(k)] = strategy.rates[i];
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("market spec validation and the mu_tilde convenience constructor") {
  CHECK_NOTHROW(MarketSpec{0.1, 0.055}.validate());
  CHECK_THROWS_AS((MarketSpec{-0.1, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MarketSpec{0.1, -0.2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MarketSpec{10.0, 7.0}.validate()), std::invalid_argument);  // bound 16

  const MarketSpec m = MarketSpec::from_mu_tilde(0.05, 0.1);
  CHECK(m.mu == doctest::Approx(0.055).epsilon(1e-15));
  CHECK(m.mu_tilde() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK_THROWS_AS(MarketSpec::from_mu_tilde(20.0, 0.1), std::invalid_argument);
}

TEST_CASE("strategy constructors and accounting") {
  const Strategy blk = Strategy::near_block(1.0, 1e-3, 1.0);
  CHECK(blk.edges == std::vector<double>{0.0, 1e-3, 1.0});
  CHECK(blk.rates.size() == 2);
  CHECK(blk.rates[0] == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(blk.rates[1] == 0.0);
  CHECK(blk.total_sold() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(blk.max_rate() == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(blk.horizon() == 1.0);

  const Strategy whole = Strategy::near_block(0.5, 1.0, 1.0);
  CHECK(whole.edges.size() == 2);
  CHECK(whole.rates[0] == 0.5);

  const Strategy flat = Strategy::constant(0.75, 2.0);
  CHECK(flat.total_sold() == doctest::Approx(1.5).epsilon(1e-15));

  const Strategy z = Strategy::zero(1.0);
  CHECK(z.total_sold() == 0.0);
  CHECK(z.max_rate() == 0.0);

  const Strategy pieces = Strategy::from_rates({1.0, 0.0, 2.0, 0.5}, 1.0);
  CHECK(pieces.edges.size() == 5);
  CHECK(pieces.edges[2] == 0.5);
  CHECK(pieces.total_sold() == doctest::Approx(0.875).epsilon(1e-12));

  CHECK_THROWS_AS(Strategy::near_block(1.0, 0.0, 1.0), StrategyError);
  CHECK_THROWS_AS(Strategy::near_block(1.0, 2.0, 1.0), StrategyError);
  CHECK_THROWS_AS(Strategy::constant(-1.0, 1.0), StrategyError);
  CHECK_THROWS_AS(Strategy::from_rates({}, 1.0), StrategyError);

  Strategy bad{{0.1, 1.0}, {1.0}};
  CHECK_THROWS_AS(bad.validate(), StrategyError);
  Strategy unordered{{0.0, 0.6, 0.5, 1.0}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(unordered.validate(), StrategyError);
  Strategy negative{{0.0, 1.0}, {-0.5}};
  CHECK_THROWS_AS(negative.validate(), StrategyError);
  Strategy mismatch{{0.0, 0.5, 1.0}, {1.0}};
  CHECK_THROWS_AS(mismatch.validate(), StrategyError);
}

TEST_CASE("simulation rejects inadmissible strategies") {
  SimConfig config = base_config();

  // Sells more than the holdings.
  CHECK_THROWS_AS(simulate_path(config, Strategy::constant(3.0, 1.0), 1, 0), StrategyError);
  // Horizon mismatch.
  CHECK_THROWS_AS(simulate_path(config, Strategy::constant(0.5, 0.5), 1, 0), StrategyError);
  // Breakpoint off the step grid: thirds on a grid of 100 steps.
  CHECK_THROWS_AS(simulate_path(config, Strategy::from_rates({1.0, 0.0, 1.0}, 1.0), 1, 0),
                  StrategyError);
  // Interval shorter than one step.
  Strategy thin{{0.0, 1e-6, 1.0}, {1.0, 0.5}};
  CHECK_THROWS_AS(simulate_path(config, thin, 1, 0), StrategyError);
  // Selling exactly the holdings is fine.
  config.phi0 = 1.0;
  CHECK_NOTHROW(simulate_path(config, Strategy::constant(1.0, 1.0), 1, 0));

  CHECK_THROWS_AS(mc_expected_utility(config, Strategy::constant(1.0, 1.0),
                                      risk_neutral_utility, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("config validation guards degenerate inputs") {
  SimConfig config = base_config();
  config.phi0 = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.s0 = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.steps = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.horizon = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("one-step accounting uses the pre-impact left-endpoint price") {
  SimConfig config = base_config();
  config.market = MarketSpec{0.0, 0.25};
  config.mode = MiMode::deterministic;
  config.phi0 = 1.0;
  config.w0 = 0.25;
  config.steps = 1;

  const PathResult r = simulate_path(config, Strategy::constant(0.5, 1.0), 7, 0);
  // Cash accrues at the initial price s0 = 1 before any impact lands.
  CHECK(r.terminal_cash == 0.75);
  CHECK(r.terminal_holdings == 0.5);
  // One deterministic decrement: mu*dt + g(0.5) * (gamma + alpha1*beta1) * dt.
  const double expected_log = -(0.25 + 0.01 * 0.25 * 3.0);
  CHECK(std::log(r.terminal_price) == doctest::Approx(expected_log).epsilon(1e-15));
  CHECK(r.min_log_price == doctest::Approx(expected_log).epsilon(1e-15));
}

TEST_CASE("recorded increments reproduce the terminal cash and log-price") {
  SimConfig config = base_config();
  config.w0 = 0.125;
  const Strategy strategy = Strategy::from_rates({2.0, 0.0, 1.0, 0.5}, 1.0);

  std::vector<double> log_price, cash_inc;
  const PathResult r = simulate_path_recorded(config, strategy, 99, 3, &log_price, &cash_inc);

  REQUIRE(log_price.size() == static_cast<std::size_t>(config.steps) + 1);
  REQUIRE(cash_inc.size() == static_cast<std::size_t>(config.steps));
  CHECK(log_price[0] == 0.0);

  // Accumulating the recorded increments in order must reproduce the terminal
  // cash bit for bit; the simulator does exactly this sum.
  double cash = config.w0;
  for (double inc : cash_inc) cash += inc;
  CHECK(cash == r.terminal_cash);

  CHECK(std::exp(log_price.back()) == doctest::Approx(r.terminal_price).epsilon(1e-15));
  double min_x = log_price[0];
  for (double x : log_price) min_x = std::min(min_x, x);
  CHECK(min_x == r.min_log_price);

  // Zero-rate steps accrue nothing.
  for (std::size_t k = 25; k < 50; ++k) CHECK(cash_inc[k] == 0.0);

  // The plain and recording entry points agree exactly.
  const PathResult p = simulate_path(config, strategy, 99, 3);
  CHECK(p.terminal_cash == r.terminal_cash);
  CHECK(p.terminal_price == r.terminal_price);
  CHECK(p.terminal_holdings == r.terminal_holdings);
  CHECK(p.min_log_price == r.min_log_price);
}

TEST_CASE("equivalent strategies with different segmentations walk the same path") {
  SimConfig config = base_config();
  const PathResult a = simulate_path(config, Strategy::constant(1.0, 1.0), 31, 4);
  const PathResult b = simulate_path(config, Strategy::from_rates({1.0, 1.0}, 1.0), 31, 4);
  CHECK(a.terminal_cash == b.terminal_cash);
  CHECK(a.terminal_price == b.terminal_price);
  CHECK(a.terminal_holdings == b.terminal_holdings);
  CHECK(a.min_log_price == b.min_log_price);
}

TEST_CASE("deterministic clock mode with zero volatility has no randomness") {
  SimConfig config = base_config();
  config.market = MarketSpec{0.0, 0.05};
  config.mode = MiMode::deterministic;

  const Strategy strategy = Strategy::from_rates({2.0, 1.0, 0.5, 0.25}, 1.0);
  const PathResult a = simulate_path(config, strategy, 1, 0);
  const PathResult b = simulate_path(config, strategy, 999, 12345);
  CHECK(a.terminal_cash == b.terminal_cash);
  CHECK(a.terminal_price == b.terminal_price);

  const McResult mc = mc_expected_utility(config, strategy, risk_neutral_utility, 64, 5);
  CHECK(mc.estimate == a.terminal_cash);
  CHECK(mc.standard_error == 0.0);
}

TEST_CASE("random mode degenerates to the averaged clock when alpha1 = 0") {
  SimConfig config = base_config();
  config.noise = SubordinatorSpec{1.0, 0.0, 2.0};

  SimConfig det = config;
  det.mode = MiMode::deterministic;

  const Strategy strategy = Strategy::constant(1.5, 1.0);
  for (std::uint64_t idx : {0ULL, 1ULL, 77ULL}) {
    const PathResult r = simulate_path(config, strategy, 11, idx);
    const PathResult d = simulate_path(det, strategy, 11, idx);
    CHECK(r.terminal_cash == d.terminal_cash);
    CHECK(r.terminal_price == d.terminal_price);
  }
}

TEST_CASE("single-path estimates have no standard error") {
  SimConfig config = base_config();
  const McResult mc =
      mc_expected_utility(config, Strategy::constant(1.0, 1.0), risk_neutral_utility, 1, 3);
  CHECK(mc.paths == 1);
  CHECK(std::isnan(mc.standard_error));
  CHECK(std::isfinite(mc.estimate));
}

TEST_CASE("parallel estimator is byte-identical to the serial reference") {
  SimConfig config = base_config();
  const Strategy strategy = Strategy::from_rates({2.0, 0.5, 0.0, 1.5}, 1.0);

  std::vector<PathResult> ref_records;
  const McResult ref = mc_expected_utility_reference(config, strategy, risk_neutral_utility, 500,
                                                     271828, &ref_records);
  for (int threads : {1, 2, 3, 8}) {
    CAPTURE(threads);
    std::vector<PathResult> records;
    const McResult par =
        mc_expected_utility(config, strategy, risk_neutral_utility, 500, 271828, threads, &records);
    CHECK(par.estimate == ref.estimate);
    CHECK(par.standard_error == ref.standard_error);
    CHECK(par.paths == ref.paths);
    REQUIRE(records.size() == ref_records.size());
    for (std::size_t i = 0; i < records.size(); i += 97) {
      CHECK(records[i].terminal_cash == ref_records[i].terminal_cash);
      CHECK(records[i].terminal_price == ref_records[i].terminal_price);
    }
  }
}

TEST_CASE("Monte Carlo mean matches the exact expectation of the discrete scheme") {
  SimConfig config = base_config();
  config.steps = 50;
  const Strategy strategy = Strategy::from_rates({2.0, 0.0, 1.0, 3.0, 0.5}, 1.0);

  const McResult mc = mc_expected_utility(config, strategy, risk_neutral_utility, 20000, 31415);
  const double exact = exact_discrete_mean_cash(config, rates_per_step(strategy, config.steps));
  CHECK(std::abs(mc.estimate - exact) <= 3.5 * mc.standard_error);

  // Same check with the Gaussian turned off isolates the jump integration.
  SimConfig no_vol = config;
  no_vol.market = MarketSpec{0.0, 0.05};
  const McResult mcj = mc_expected_utility(no_vol, strategy, risk_neutral_utility, 20000, 27182);
  const double exactj = exact_discrete_mean_cash(no_vol, rates_per_step(strategy, no_vol.steps));
  CHECK(std::abs(mcj.estimate - exactj) <= 3.5 * mcj.standard_error);
}

TEST_CASE("selling slower never leaves the price lower, path by path") {
  SimConfig config = base_config();
  config.phi0 = 3.0;
  const Strategy faster = Strategy::from_rates({2.0, 1.0, 0.5, 2.5}, 1.0);
  const Strategy slower = Strategy::from_rates({1.0, 0.5, 0.0, 2.0}, 1.0);

  std::vector<double> x_fast, x_slow;
  for (std::uint64_t idx = 0; idx < 50; ++idx) {
    simulate_path_recorded(config, faster, 606, idx, &x_fast);
    simulate_path_recorded(config, slower, 606, idx, &x_slow);
    for (std::size_t k = 0; k < x_fast.size(); ++k) {
      REQUIRE(x_slow[k] >= x_fast[k]);
    }
  }
}

TEST_CASE("noisy impact clock is worth at least the averaged clock in expectation") {
  // exp(-g L) is convex in L, so replacing the clock increments by their mean
  // can only lower the expected proceeds (Jensen).  Checked within MC noise.
  SimConfig config = base_config();
  config.market = MarketSpec{0.0, 0.05};
  config.phi0 = 10.0;
  const Strategy strategy = Strategy::constant(8.0, 1.0);

  const McResult noisy = mc_expected_utility(config, strategy, risk_neutral_utility, 4000, 161803);

  SimConfig det = config;
  det.mode = MiMode::deterministic;
  const double averaged = simulate_path(det, strategy, 161803, 0).terminal_cash;

  CHECK(noisy.estimate + 3.0 * noisy.standard_error >= averaged);
  // The gap should be genuine at these parameters, not a tie.
  CHECK(noisy.estimate > averaged);
}

TEST_CASE("discretization error of the cash integral shrinks linearly in dt") {
  SimConfig config = base_config();
  config.market = MarketSpec{0.0, 0.05};
  config.mode = MiMode::deterministic;
  config.phi0 = 1.0;
  const Strategy strategy = Strategy::constant(1.0, 1.0);

  auto cash_at = [&](std::int64_t steps) {
    SimConfig c = config;
    c.steps = steps;
    return simulate_path(c, strategy, 1, 0).terminal_cash;
  };
  const double fine = cash_at(8000);
  const double err250 = cash_at(250) - fine;
  const double err500 = cash_at(500) - fine;
  REQUIRE(err500 != 0.0);
  const double ratio = err250 / err500;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
}
