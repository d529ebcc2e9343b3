#include "impactflow/market_sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "impactflow/detail/summation.hpp"
#include "impactflow/detail/threads.hpp"
#include "impactflow/errors.hpp"

namespace impactflow {

namespace {

using detail::resolve_threads;

// Strategy compiled onto the step grid: contiguous runs of constant rate.
struct Segment {
  std::int64_t begin;
  std::int64_t end;
  double rate;
  double g_rate;  // impact.g(rate), precomputed per segment
};

std::vector<Segment> compile_strategy(const SimConfig& config, const Strategy& strategy) {
  strategy.validate();
  const double dt = config.horizon / static_cast<double>(config.steps);
  if (std::fabs(strategy.horizon() - config.horizon) > 1e-9 * std::max(1.0, config.horizon)) {
    throw StrategyError("strategy horizon " + std::to_string(strategy.horizon()) +
                        " does not match simulation horizon " + std::to_string(config.horizon));
  }
  if (strategy.total_sold() > config.phi0 + 1e-12) {
    throw StrategyError("strategy sells " + std::to_string(strategy.total_sold()) +
                        " which exceeds initial holdings " + std::to_string(config.phi0));
  }
  std::vector<Segment> segments;
  segments.reserve(strategy.rates.size());
  std::int64_t prev_step = 0;
  for (std::size_t i = 0; i < strategy.edges.size(); ++i) {
    const double edge = strategy.edges[i];
    const auto k = static_cast<std::int64_t>(std::llround(edge / dt));
    if (std::fabs(edge - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, config.horizon)) {
      throw StrategyError("strategy breakpoint " + std::to_string(edge) +
                          " does not lie on the step grid (dt = " + std::to_string(dt) + ")");
    }
    if (i == 0) continue;
    if (k <= prev_step) {
      throw StrategyError("strategy interval ending at " + std::to_string(edge) +
                          " is shorter than one simulation step");
    }
    segments.push_back({prev_step, k, strategy.rates[i - 1], config.impact.g(strategy.rates[i - 1])});
    prev_step = k;
  }
  if (prev_step != config.steps) {
    throw StrategyError("strategy does not span the simulation horizon");
  }
  return segments;
}

// Core Euler walk over one path.  `hook(k, x_after, cash_increment)` is called
// once per step; an empty hook compiles away.
template <class StepHook>
PathResult run_path(const SimConfig& config, const std::vector<Segment>& segments,
                    std::uint64_t master_seed, std::uint64_t path_index, StepHook&& hook) {
  const double dt = config.horizon / static_cast<double>(config.steps);
  const double sqrt_dt = std::sqrt(dt);
  const double sigma = config.market.sigma;
  const double mu_dt = config.market.mu * dt;
  const bool random_mode = config.mode == MiMode::random;
  const double gamma_dt = config.noise.gamma * dt;
  const double mean_clock_dt = (config.noise.gamma + config.noise.alpha1 * config.noise.beta1) * dt;
  const double jump_shape = config.noise.alpha1 * dt;

  const std::uint64_t key = path_key(master_seed, path_index);
  double x = std::log(config.s0);
  double min_x = x;
  double cash = config.w0;
  double holdings = config.phi0;

  for (const Segment& seg : segments) {
    const double rate = seg.rate;
    const double sale_dt = rate * dt;
    const double g_rate = seg.g_rate;
    const bool draw_jump = random_mode && jump_shape > 0.0 && g_rate > 0.0;
    // Deterministic part of the per-step log-price decrement.
    const double drift_dec = mu_dt + g_rate * (random_mode ? gamma_dt : mean_clock_dt);
    for (std::int64_t k = seg.begin; k < seg.end; ++k) {
      double cash_inc = 0.0;
      if (rate > 0.0) {
        cash_inc = sale_dt * std::exp(x);  // pre-impact left-endpoint price
        cash += cash_inc;
        holdings -= sale_dt;
      }
      double dx = -drift_dec;
      if (sigma > 0.0) {
        dx += sigma * sqrt_dt * substream(key, static_cast<std::uint64_t>(k), 0).next_normal();
      }
      if (draw_jump) {
        RngStream jump_stream = substream(key, static_cast<std::uint64_t>(k), 1);
        dx -= g_rate * gamma_sample(jump_stream, jump_shape, config.noise.beta1);
      }
      x += dx;
      if (x < min_x) min_x = x;
      hook(k, x, cash_inc);
    }
  }
  return {cash, holdings, std::exp(x), min_x};
}

struct NoHook {
  void operator()(std::int64_t, double, double) const {}
};

McResult reduce_mc(const std::vector<double>& values) {
  const auto n = static_cast<std::int64_t>(values.size());
  detail::NeumaierSum mean_sum;
  for (double v : values) mean_sum.add(v);
  const double mean = mean_sum.value() / static_cast<double>(n);
  if (n < 2) {
    return {mean, std::numeric_limits<double>::quiet_NaN(), n};
  }
  detail::NeumaierSum var_sum;
  for (double v : values) {
    const double d = v - mean;
    var_sum.add(d * d);
  }
  const double sample_var = var_sum.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(sample_var / static_cast<double>(n)), n};
}

}  // namespace

void MarketSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("MarketSpec: sigma must be finite and >= 0, got " + std::to_string(sigma));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("MarketSpec: mu must be finite and >= 0, got " + std::to_string(mu));
  }
  if (!(bound > 0.0) || std::fabs(sigma) + std::fabs(mu) > bound) {
    throw std::invalid_argument("MarketSpec: |sigma| + |mu| exceeds the coefficient bound " + std::to_string(bound));
  }
}

MarketSpec MarketSpec::from_mu_tilde(double mu_tilde, double sigma, double bound) {
  MarketSpec market;
  market.sigma = sigma;
  market.mu = mu_tilde + 0.5 * sigma * sigma;
  market.bound = bound;
  market.validate();
  return market;
}

double Strategy::total_sold() const {
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    total += rates[i] * (edges[i + 1] - edges[i]);
  }
  return total;
}

double Strategy::max_rate() const {
  double m = 0.0;
  for (double r : rates) m = std::max(m, r);
  return m;
}

void Strategy::validate() const {
  if (edges.size() < 2 || rates.size() != edges.size() - 1) {
    throw StrategyError("strategy must have at least one interval and rates.size() == edges.size() - 1");
  }
  if (edges.front() != 0.0) {
    throw StrategyError("strategy must start at time 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1]) || !std::isfinite(edges[i])) {
      throw StrategyError("strategy breakpoints must be finite and strictly increasing");
    }
  }
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw StrategyError("strategy rates must be finite and >= 0");
    }
  }
}

Strategy Strategy::zero(double horizon) {
  if (!(horizon > 0.0)) throw StrategyError("horizon must be > 0");
  return {{0.0, horizon}, {0.0}};
}

Strategy Strategy::constant(double rate, double horizon) {
  if (!(horizon > 0.0)) throw StrategyError("horizon must be > 0");
  if (!(rate >= 0.0)) throw StrategyError("rate must be >= 0");
  return {{0.0, horizon}, {rate}};
}

Strategy Strategy::near_block(double psi, double delta, double horizon) {
  if (!(delta > 0.0)) throw StrategyError("near_block: delta must be > 0");
  if (delta > horizon) throw StrategyError("near_block: delta must not exceed the horizon");
  if (!(psi >= 0.0)) throw StrategyError("near_block: psi must be >= 0");
  if (delta == horizon) return {{0.0, horizon}, {psi / delta}};
  return {{0.0, delta, horizon}, {psi / delta, 0.0}};
}

Strategy Strategy::from_rates(std::vector<double> rates, double horizon) {
  if (rates.empty()) throw StrategyError("from_rates: need at least one rate");
  if (!(horizon > 0.0)) throw StrategyError("from_rates: horizon must be > 0");
  std::vector<double> edges(rates.size() + 1);
  const auto m = static_cast<double>(rates.size());
  for (std::size_t i = 0; i <= rates.size(); ++i) {
    edges[i] = horizon * (static_cast<double>(i) / m);
  }
  Strategy s{std::move(edges), std::move(rates)};
  s.validate();
  return s;
}

void SimConfig::validate() const {
  market.validate();
  impact.validate();
  noise.validate();
  if (!(phi0 >= 0.0) || !std::isfinite(phi0)) throw std::invalid_argument("SimConfig: phi0 must be finite and >= 0");
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw std::invalid_argument("SimConfig: s0 must be finite and > 0");
  if (!std::isfinite(w0)) throw std::invalid_argument("SimConfig: w0 must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("SimConfig: horizon must be finite and > 0");
  if (steps < 1) throw std::invalid_argument("SimConfig: steps must be >= 1");
}

PathResult simulate_path(const SimConfig& config, const Strategy& strategy,
                         std::uint64_t master_seed, std::uint64_t path_index) {
  config.validate();
  const auto segments = compile_strategy(config, strategy);
  return run_path(config, segments, master_seed, path_index, NoHook{});
}

PathResult simulate_path_recorded(const SimConfig& config, const Strategy& strategy,
                                  std::uint64_t master_seed, std::uint64_t path_index,
                                  std::vector<double>* log_price,
                                  std::vector<double>* cash_increments) {
  config.validate();
  const auto segments = compile_strategy(config, strategy);
  if (log_price != nullptr) {
    log_price->assign(static_cast<std::size_t>(config.steps) + 1, 0.0);
    (*log_price)[0] = std::log(config.s0);
  }
  if (cash_increments != nullptr) {
    cash_increments->assign(static_cast<std::size_t>(config.steps), 0.0);
  }
  return run_path(config, segments, master_seed, path_index,
                  [&](std::int64_t k, double x_after, double cash_inc) {
                    if (log_price != nullptr) (*log_price)[static_cast<std::size_t>(k) + 1] = x_after;
                    if (cash_increments != nullptr) (*cash_increments)[static_cast<std::size_t>(k)] = cash_inc;
                  });
}

McResult mc_expected_utility(const SimConfig& config, const Strategy& strategy,
                             const Utility& utility, std::int64_t paths,
                             std::uint64_t master_seed, int threads,
                             std::vector<PathResult>* records) {
  config.validate();
  if (paths < 1) throw std::invalid_argument("mc_expected_utility: paths must be >= 1");
  const auto segments = compile_strategy(config, strategy);
  std::vector<double> values(static_cast<std::size_t>(paths));
  if (records != nullptr) records->assign(static_cast<std::size_t>(paths), PathResult{});

  const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (std::int64_t p = 0; p < paths; ++p) {
    const PathResult r = run_path(config, segments, master_seed, static_cast<std::uint64_t>(p), NoHook{});
    values[static_cast<std::size_t>(p)] =
        utility(r.terminal_cash, r.terminal_holdings, r.terminal_price);
    if (records != nullptr) (*records)[static_cast<std::size_t>(p)] = r;
  }
  (void)nthreads;
  return reduce_mc(values);
}

McResult mc_expected_utility_reference(const SimConfig& config, const Strategy& strategy,
                                       const Utility& utility, std::int64_t paths,
                                       std::uint64_t master_seed,
                                       std::vector<PathResult>* records) {
  config.validate();
  if (paths < 1) throw std::invalid_argument("mc_expected_utility: paths must be >= 1");
  const auto segments = compile_strategy(config, strategy);
  std::vector<double> values(static_cast<std::size_t>(paths));
  if (records != nullptr) records->assign(static_cast<std::size_t>(paths), PathResult{});
  for (std::int64_t p = 0; p < paths; ++p) {
    const PathResult r = run_path(config, segments, master_seed, static_cast<std::uint64_t>(p), NoHook{});
    values[static_cast<std::size_t>(p)] =
        utility(r.terminal_cash, r.terminal_holdings, r.terminal_price);
    if (records != nullptr) (*records)[static_cast<std::size_t>(p)] = r;
  }
  return reduce_mc(values);
}

}  // namespace impactflow
