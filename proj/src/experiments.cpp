#include "impactflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "impactflow/config.hpp"
#include "impactflow/csv.hpp"
#include "impactflow/errors.hpp"
#include "impactflow/impact_model.hpp"
#include "impactflow/plot.hpp"

namespace impactflow {

namespace {

constexpr double kAlpha0 = 0.01;
constexpr double kMuTilde = 0.05;
constexpr double kHorizon = 1.0;
constexpr std::int64_t kN = 500;
constexpr double kMcSigma = 0.1;
constexpr std::uint64_t kSuiteSalt = 0x5354524154454759ULL;
constexpr std::uint64_t kPairSalt = 0x5041495253414C54ULL;

std::string fmt(double v) { return format_double(v); }

const char* yn(bool v) { return v ? "yes" : "no"; }

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

DpParams make_dp(double gamma, double alpha1, double beta1, double phi0,
                 std::int64_t grid_m) {
  DpParams params;
  params.n = kN;
  params.k_max = kN;
  params.mu_tilde = kMuTilde;
  params.impact.p = 2;
  params.impact.alpha0 = kAlpha0;
  params.noise = {gamma, alpha1, beta1};
  params.phi_max = phi0;
  params.grid_m = grid_m;
  return params;
}

std::vector<std::int64_t> strided(std::int64_t last, std::int64_t stride) {
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < last; i += stride) idx.push_back(i);
  idx.push_back(last);
  return idx;
}

struct FamilyMember {
  double alpha1;
  DpParams params;
};

// Shared runner for the figure families: one DP solve per alpha1, strategy
// extraction at the full initial holdings, shape detectors, CSV artifacts,
// and a terminal-holdings monotonicity check across the family.
ScenarioResult run_dp_family(const ScenarioRequest& req,
                             const std::vector<FamilyMember>& members,
                             bool terminal_non_increasing) {
  ScenarioResult result;
  result.name = req.name;
  const std::uint64_t hash = fnv1a64("scenario=" + req.name);
  std::vector<PlotSeries> rate_series;
  std::vector<PlotSeries> holdings_series;
  std::vector<double> terminals;

  for (const FamilyMember& member : members) {
    const DpSolution sol = solve(member.params, req.threads);
    const ExtractedStrategy strat = extract_strategy(sol, member.params.phi_max);
    const RateShape shape = classify_rates(strat.rate);
    const std::int64_t k_max = member.params.k_max;
    const std::int64_t m = sol.grid_m;
    const std::string tag = "alpha1-" + fmt(member.alpha1);

    {
      const std::string path = join(req.out_dir, "values-" + tag + ".csv");
      CsvWriter csv(path, {"k", "phi", "f", "psi_star"}, hash, req.seed);
      const auto k_idx = strided(k_max, std::max<std::int64_t>(1, k_max / 50));
      const auto j_idx = strided(m, std::max<std::int64_t>(1, m / 50));
      for (const std::int64_t k : k_idx) {
        for (const std::int64_t j : j_idx) {
          csv.row({static_cast<double>(k), sol.phi[static_cast<std::size_t>(j)],
                   sol.node_value(k, j), sol.node_policy(k, j)});
        }
      }
      csv.close();
      result.files.push_back(path);
    }
    {
      const std::string path = join(req.out_dir, "strategy-" + tag + ".csv");
      CsvWriter csv(path, {"t", "zeta", "phi"}, hash, req.seed);
      for (std::int64_t l = 0; l < k_max; ++l) {
        const auto i = static_cast<std::size_t>(l);
        csv.row({strat.time[i], strat.rate[i], strat.holdings[i]});
      }
      csv.close();
      result.files.push_back(path);
    }
    {
      const std::string path = join(req.out_dir, "trajectory-" + tag + ".csv");
      CsvWriter csv(path, {"t", "phi"}, hash, req.seed);
      for (std::int64_t l = 0; l <= k_max; ++l) {
        const auto i = static_cast<std::size_t>(l);
        csv.row({strat.time[i], strat.holdings[i]});
      }
      csv.close();
      result.files.push_back(path);
    }

    const double f_top = sol.node_value(k_max, m);
    const double tc = total_mi_cost(f_top, member.params.phi_max, 1.0);
    const double terminal = strat.holdings.back();
    terminals.push_back(terminal);
    result.summary.push_back(
        "alpha1=" + fmt(member.alpha1) + ": f(1," + fmt(member.params.phi_max) +
        ")=" + fmt(f_top) + " tc=" + fmt(tc) + " terminal_holdings=" + fmt(terminal) +
        " constant_speed=" + yn(shape.constant_speed) +
        " increasing_speed=" + yn(shape.increasing_speed));

    const std::string label = "alpha1=" + fmt(member.alpha1);
    rate_series.push_back(
        {label,
         std::vector<double>(strat.time.begin(), strat.time.end() - 1),
         strat.rate});
    holdings_series.push_back({label, strat.time, strat.holdings});
  }

  bool monotone = true;
  for (std::size_t i = 1; i < terminals.size(); ++i) {
    if (terminal_non_increasing) {
      monotone = monotone && terminals[i] <= terminals[i - 1] + 1e-9;
    } else {
      monotone = monotone && terminals[i] >= terminals[i - 1] - 1e-9;
    }
  }
  result.summary.push_back(std::string("terminal_holdings_") +
                           (terminal_non_increasing ? "non_increasing" : "non_decreasing") +
                           "=" + yn(monotone));

  if (req.plots) {
    const std::string rate_path = join(req.out_dir, "strategy.svg");
    write_svg_lines(rate_path, req.name + ": execution rate", "t", "zeta", rate_series);
    result.files.push_back(rate_path);
    const std::string holdings_path = join(req.out_dir, "trajectory.svg");
    write_svg_lines(holdings_path, req.name + ": holdings", "t", "phi", holdings_series);
    result.files.push_back(holdings_path);
  }
  return result;
}

ScenarioResult run_tc_curve(const ScenarioRequest& req) {
  ScenarioResult result;
  result.name = req.name;
  const std::uint64_t hash = fnv1a64("scenario=" + req.name);
  const double alphas[] = {0.0, 0.5, 1.0};

  std::vector<std::vector<double>> tc_rows;  // per alpha1, 20 points
  std::vector<double> phis;
  for (int i = 1; i <= 20; ++i) phis.push_back(0.5 * i);

  for (const double alpha1 : alphas) {
    double gamma = 1.0;
    double beta1 = 2.0;
    if (alpha1 > 0.0) {
      const FixedGammaTilde resolved = resolve_fixed_gamma_tilde(alpha1);
      gamma = resolved.gamma;
      beta1 = resolved.beta1;
    }
    const DpSolution sol = solve(make_dp(gamma, alpha1, beta1, 10.0, 2000), req.threads);
    std::vector<double> tcs;
    for (const double phi : phis) {
      tcs.push_back(total_mi_cost(sol.value_at(sol.params.k_max, phi), phi, 1.0));
    }
    tc_rows.push_back(std::move(tcs));
  }

  const std::string path = join(req.out_dir, "tc.csv");
  CsvWriter csv(path, {"alpha1", "phi", "tc"}, hash, req.seed);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < phis.size(); ++i) {
      csv.row({alphas[a], phis[i], tc_rows[a][i]});
    }
  }
  csv.close();
  result.files.push_back(path);

  for (const double phi : {1.0, 10.0}) {
    const auto i = static_cast<std::size_t>(phi * 2.0) - 1;
    const bool decreasing = tc_rows[0][i] > tc_rows[1][i] && tc_rows[1][i] > tc_rows[2][i];
    result.summary.push_back("tc(phi=" + fmt(phi) + "): alpha1=0 -> " + fmt(tc_rows[0][i]) +
                             ", alpha1=0.5 -> " + fmt(tc_rows[1][i]) + ", alpha1=1 -> " +
                             fmt(tc_rows[2][i]) + ", strictly_decreasing=" + yn(decreasing));
  }

  if (req.plots) {
    std::vector<PlotSeries> series;
    for (std::size_t a = 0; a < 3; ++a) {
      series.push_back({"alpha1=" + fmt(alphas[a]), phis, tc_rows[a]});
    }
    const std::string plot_path = join(req.out_dir, "tc.svg");
    write_svg_lines(plot_path, req.name + ": total impact cost", "phi", "tc", series);
    result.files.push_back(plot_path);
  }
  return result;
}

ScenarioResult run_linear_invariance(const ScenarioRequest& req) {
  ScenarioResult result;
  result.name = req.name;
  const std::int64_t paths = req.paths > 0 ? req.paths : 100000;
  const std::uint64_t hash =
      fnv1a64("scenario=" + req.name + "\npaths=" + std::to_string(paths));

  SimConfig config;
  config.market = MarketSpec::from_mu_tilde(kMuTilde, kMcSigma);
  config.impact = {1, kAlpha0};
  config.phi0 = 1.0;
  config.s0 = 1.0;
  config.w0 = 0.0;
  config.horizon = kHorizon;
  config.steps = 10000;
  config.mode = MiMode::random;
  const Strategy near_block = Strategy::near_block(1.0, 1e-3, kHorizon);
  const double closed = linear_impact_value(0.0, 1.0, 1.0, 1.0, kAlpha0);

  const double alphas[] = {0.0, 1.0, 3.0};
  std::vector<McResult> estimates;
  for (const double alpha1 : alphas) {
    config.noise = {1.0, alpha1, 2.0};
    estimates.push_back(mc_expected_utility(config, near_block, risk_neutral_utility, paths,
                                            req.seed, req.threads));
  }

  const std::string path = join(req.out_dir, "invariance.csv");
  CsvWriter csv(path, {"alpha1", "estimate", "se", "closed_form", "abs_dev", "within_3se"},
                hash, req.seed);
  for (std::size_t a = 0; a < 3; ++a) {
    const double dev = std::fabs(estimates[a].estimate - closed);
    const bool within = dev <= 3.0 * estimates[a].standard_error;
    csv.row({alphas[a], estimates[a].estimate, estimates[a].standard_error, closed, dev,
             within ? 1.0 : 0.0});
    result.summary.push_back("alpha1=" + fmt(alphas[a]) + ": estimate=" +
                             fmt(estimates[a].estimate) + " se=" +
                             fmt(estimates[a].standard_error) + " closed_form=" + fmt(closed) +
                             " within_3se=" + yn(within));
  }
  csv.close();
  result.files.push_back(path);

  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      const double diff = std::fabs(estimates[a].estimate - estimates[b].estimate);
      const double combined =
          std::sqrt(estimates[a].standard_error * estimates[a].standard_error +
                    estimates[b].standard_error * estimates[b].standard_error);
      result.summary.push_back("alpha1=" + fmt(alphas[a]) + " vs alpha1=" + fmt(alphas[b]) +
                               ": |diff|=" + fmt(diff) + " 3*combined_se=" +
                               fmt(3.0 * combined) + " agrees=" + yn(diff <= 3.0 * combined));
    }
  }
  return result;
}

ScenarioResult run_random_vs_deterministic(const ScenarioRequest& req) {
  ScenarioResult result;
  result.name = req.name;
  const std::int64_t paths = req.paths > 0 ? req.paths : 20000;
  const int count = 50;
  const std::uint64_t hash =
      fnv1a64("scenario=" + req.name + "\npaths=" + std::to_string(paths));

  SimConfig base;
  base.market = MarketSpec::from_mu_tilde(kMuTilde, kMcSigma);
  base.impact = {2, kAlpha0};
  base.noise = {1.0, 1.0, 2.0};
  base.phi0 = 10.0;
  base.s0 = 1.0;
  base.w0 = 0.0;
  base.horizon = kHorizon;
  base.steps = 500;
  base.mode = MiMode::random;

  const auto strategies = random_strategy_suite(count, base.phi0, kHorizon, req.seed);
  const auto rows = compare_random_vs_deterministic(strategies, base, paths, req.seed,
                                                    req.threads);

  const std::string path = join(req.out_dir, "comparison.csv");
  CsvWriter csv(path, {"index", "mc_random", "mc_random_se", "deterministic_value", "margin",
                       "holds"},
                hash, req.seed);
  int holding = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& r = rows[i];
    const double margin = r.mc_random + 3.0 * r.mc_random_se - r.deterministic_value;
    csv.row({static_cast<double>(i), r.mc_random, r.mc_random_se, r.deterministic_value,
             margin, r.inequality_holds ? 1.0 : 0.0});
    if (r.inequality_holds) {
      ++holding;
    } else {
      result.summary.push_back("strategy " + std::to_string(i) + ": mc_random=" +
                               fmt(r.mc_random) + " + 3*se falls short of deterministic=" +
                               fmt(r.deterministic_value));
    }
  }
  csv.close();
  result.files.push_back(path);
  result.summary.insert(result.summary.begin(),
                        "noisy-clock value >= averaged-clock value for " +
                            std::to_string(holding) + "/" + std::to_string(rows.size()) +
                            " strategies");
  return result;
}

}  // namespace

FixedGammaTilde resolve_fixed_gamma_tilde(double alpha1) {
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1)) {
    throw std::invalid_argument("resolve_fixed_gamma_tilde: alpha1 must be finite and > 0");
  }
  const double beta1 = std::sqrt(0.5 / alpha1);
  const double gamma = 1.0 - alpha1 * beta1;
  if (gamma < 0.0) {
    throw std::invalid_argument("resolve_fixed_gamma_tilde: alpha1 = " + fmt(alpha1) +
                                " forces gamma = " + fmt(gamma) + " < 0");
  }
  return {gamma, beta1};
}

RateShape classify_rates(const std::vector<double>& rates) {
  RateShape shape{true, false, 0.0, 0.0, 0.0};
  double peak = 0.0;
  for (const double r : rates) peak = std::max(peak, r);
  if (peak <= 0.0) return shape;
  const double threshold = 1e-6 * peak;

  std::ptrdiff_t first = -1;
  std::ptrdiff_t last = -1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rates.size()); ++i) {
    if (rates[static_cast<std::size_t>(i)] > threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }
  shape.first_active = rates[static_cast<std::size_t>(first)];
  shape.last_active = rates[static_cast<std::size_t>(last)];
  shape.increasing_speed = shape.last_active >= 1.10 * shape.first_active;

  double sum = 0.0;
  std::int64_t n = 0;
  for (std::ptrdiff_t i = first + 1; i < last; ++i) {
    const double r = rates[static_cast<std::size_t>(i)];
    if (r > threshold) {
      sum += r;
      ++n;
    }
  }
  if (n >= 2) {
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::ptrdiff_t i = first + 1; i < last; ++i) {
      const double r = rates[static_cast<std::size_t>(i)];
      if (r > threshold) {
        const double d = r - mean;
        ss += d * d;
      }
    }
    shape.cov = std::sqrt(ss / static_cast<double>(n - 1)) / mean;
    shape.constant_speed = shape.cov < 0.05;
  }
  return shape;
}

std::vector<Strategy> random_strategy_suite(int count, double phi0, double horizon,
                                            std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("random_strategy_suite: count must be >= 0");
  if (!(phi0 > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("random_strategy_suite: phi0 and horizon must be > 0");
  }
  const double cap = 2.0 * phi0 / horizon;
  const double interval = horizon / 10.0;
  std::vector<Strategy> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RngStream stream(path_key(seed ^ kSuiteSalt, static_cast<std::uint64_t>(i)));
    std::vector<double> rates(10);
    double total = 0.0;
    for (double& r : rates) {
      r = cap * stream.next_unit();
      total += r * interval;
    }
    if (total > phi0) {
      const double scale = phi0 / total;
      for (double& r : rates) r *= scale;
    }
    out.push_back(Strategy::from_rates(std::move(rates), horizon));
  }
  return out;
}

std::vector<StrategyPair> random_dominated_pairs(int count, double phi0, double horizon,
                                                 std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("random_dominated_pairs: count must be >= 0");
  if (!(phi0 > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("random_dominated_pairs: phi0 and horizon must be > 0");
  }
  const double cap = 2.0 * phi0 / horizon;
  const double interval = horizon / 10.0;
  std::vector<StrategyPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RngStream stream(path_key(seed ^ kPairSalt, static_cast<std::uint64_t>(i)));
    std::vector<double> fast(10);
    double total = 0.0;
    for (double& r : fast) {
      r = cap * stream.next_unit();
      total += r * interval;
    }
    if (total > phi0) {
      const double scale = phi0 / total;
      for (double& r : fast) r *= scale;
    }
    std::vector<double> slow(10);
    for (std::size_t j = 0; j < 10; ++j) slow[j] = stream.next_unit() * fast[j];
    out.push_back({Strategy::from_rates(std::move(slow), horizon),
                   Strategy::from_rates(std::move(fast), horizon)});
  }
  return out;
}

std::vector<ComparisonRow> compare_random_vs_deterministic(
    const std::vector<Strategy>& strategies, const SimConfig& base, std::int64_t paths,
    std::uint64_t seed, int threads) {
  SimConfig random_config = base;
  random_config.mode = MiMode::random;
  SimConfig det_config = base;
  det_config.mode = MiMode::deterministic;
  // A noise-free path computes the expectation exactly: the risk-neutral
  // value only sees E[exp(X)], and the Brownian factor integrates to the
  // mu_tilde drift.
  det_config.market = MarketSpec::from_mu_tilde(base.market.mu_tilde(), 0.0, base.market.bound);

  std::vector<ComparisonRow> rows;
  rows.reserve(strategies.size());
  for (const Strategy& strategy : strategies) {
    const McResult mc = mc_expected_utility(random_config, strategy, risk_neutral_utility,
                                            paths, seed, threads);
    const double det = simulate_path(det_config, strategy, seed, 0).terminal_cash;
    const bool holds = mc.estimate + 3.0 * mc.standard_error >= det;
    rows.push_back({mc.estimate, mc.standard_error, det, holds});
  }
  return rows;
}

std::vector<std::string> scenario_names() {
  return {"fixed-gamma-phi1",        "fixed-gamma-phi10",
          "fixed-gamma-phi100",      "fixed-gamma-tilde-phi100",
          "fixed-gamma-tilde-tc",    "linear-invariance",
          "random-vs-deterministic"};
}

ScenarioResult run_scenario(const ScenarioRequest& request) {
  std::filesystem::create_directories(request.out_dir.empty() ? "." : request.out_dir);
  const std::string& name = request.name;

  if (name == "fixed-gamma-phi1" || name == "fixed-gamma-phi10" ||
      name == "fixed-gamma-phi100") {
    double phi0 = 1.0;
    std::int64_t grid_m = 400;
    if (name == "fixed-gamma-phi10") {
      phi0 = 10.0;
      grid_m = 1000;
    } else if (name == "fixed-gamma-phi100") {
      phi0 = 100.0;
      grid_m = 0;
    }
    std::vector<FamilyMember> members;
    for (const double alpha1 : {0.0, 1.0, 3.0}) {
      members.push_back({alpha1, make_dp(1.0, alpha1, 2.0, phi0, grid_m)});
    }
    return run_dp_family(request, members, false);
  }
  if (name == "fixed-gamma-tilde-phi100") {
    std::vector<FamilyMember> members;
    members.push_back({0.0, make_dp(1.0, 0.0, 2.0, 100.0, 0)});
    for (const double alpha1 : {0.5, 1.0}) {
      const FixedGammaTilde resolved = resolve_fixed_gamma_tilde(alpha1);
      members.push_back({alpha1, make_dp(resolved.gamma, alpha1, resolved.beta1, 100.0, 0)});
    }
    return run_dp_family(request, members, true);
  }
  if (name == "fixed-gamma-tilde-tc") return run_tc_curve(request);
  if (name == "linear-invariance") return run_linear_invariance(request);
  if (name == "random-vs-deterministic") return run_random_vs_deterministic(request);
  throw UnknownScenarioError(name, scenario_names());
}

}  // namespace impactflow
