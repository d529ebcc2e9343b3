#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "impactflow/errors.hpp"
#include "impactflow/experiments.hpp"

using namespace impactflow;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("impactflow_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("fixed mean/variance family: resolved parameters hit both constraints") {
  const FixedGammaTilde half = resolve_fixed_gamma_tilde(0.5);
  CHECK(half.beta1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(half.gamma == doctest::Approx(0.5).epsilon(1e-15));

  const FixedGammaTilde one = resolve_fixed_gamma_tilde(1.0);
  CHECK(one.beta1 == doctest::Approx(0.70710678118654752).epsilon(1e-15));
  CHECK(one.gamma == doctest::Approx(0.29289321881345248).epsilon(1e-15));

  for (double alpha1 : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    CAPTURE(alpha1);
    const FixedGammaTilde p = resolve_fixed_gamma_tilde(alpha1);
    CHECK(std::abs(p.gamma + alpha1 * p.beta1 - 1.0) <= 1e-14);
    CHECK(std::abs(alpha1 * p.beta1 * p.beta1 - 0.5) <= 1e-14);
    CHECK(p.gamma >= 0.0);
  }

  // alpha1 = 2 sits exactly on the gamma = 0 edge and is still resolvable.
  const FixedGammaTilde edge = resolve_fixed_gamma_tilde(2.0);
  CHECK(edge.gamma == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(edge.beta1 == doctest::Approx(0.5).epsilon(1e-14));

  // Beyond the edge the drift would need to be negative.
  CHECK_THROWS_AS(resolve_fixed_gamma_tilde(3.0), std::invalid_argument);
  CHECK_THROWS_AS(resolve_fixed_gamma_tilde(0.0), std::invalid_argument);
  CHECK_THROWS_AS(resolve_fixed_gamma_tilde(-1.0), std::invalid_argument);
}

TEST_CASE("rate-shape classifiers on synthetic profiles") {
  // Flat profile: constant speed, not increasing.
  {
    const RateShape s = classify_rates(std::vector<double>(50, 1.3));
    CHECK(s.constant_speed);
    CHECK_FALSE(s.increasing_speed);
    CHECK(s.cov == doctest::Approx(0.0));
  }
  // Linear ramp: clearly increasing, not constant.
  {
    std::vector<double> ramp(50);
    for (int i = 0; i < 50; ++i) ramp[static_cast<std::size_t>(i)] = 0.5 + 0.04 * i;
    const RateShape s = classify_rates(ramp);
    CHECK(s.increasing_speed);
    CHECK_FALSE(s.constant_speed);
    CHECK(s.first_active == doctest::Approx(0.5));
    CHECK(s.last_active == doctest::Approx(0.5 + 0.04 * 49));
  }
  // Tiny terminal droop below 10%: not increasing.
  {
    std::vector<double> flat(50, 1.0);
    flat.back() = 1.05;
    const RateShape s = classify_rates(flat);
    CHECK_FALSE(s.increasing_speed);
  }
  // Leading and trailing dead cells are outside the active region, and the
  // two boundary cells of the active region are excluded from the CoV.
  {
    std::vector<double> padded{0.0, 0.0, 0.4, 1.0, 1.0, 1.0, 1.0, 2.5, 0.0};
    const RateShape s = classify_rates(padded);
    CHECK(s.first_active == doctest::Approx(0.4));
    CHECK(s.last_active == doctest::Approx(2.5));
    CHECK(s.constant_speed);  // interior cells are all 1.0
    CHECK(s.increasing_speed);
  }
  // Degenerate inputs.
  {
    const RateShape s = classify_rates(std::vector<double>(10, 0.0));
    CHECK(s.constant_speed);
    CHECK_FALSE(s.increasing_speed);
  }
  {
    const RateShape s = classify_rates({});
    CHECK(s.constant_speed);
    CHECK_FALSE(s.increasing_speed);
  }
}

TEST_CASE("random strategy suite: admissible, bounded, reproducible") {
  const double phi0 = 10.0, horizon = 1.0;
  const auto suite = random_strategy_suite(50, phi0, horizon, 7);
  REQUIRE(suite.size() == 50);
  for (const Strategy& s : suite) {
    CHECK_NOTHROW(s.validate());
    CHECK(s.rates.size() == 10);
    CHECK(s.horizon() == doctest::Approx(horizon).epsilon(1e-15));
    CHECK(s.total_sold() <= phi0 + 1e-12);
    for (double r : s.rates) {
      CHECK(r >= 0.0);
      CHECK(r <= 2.0 * phi0 / horizon + 1e-12);
    }
  }

  const auto again = random_strategy_suite(50, phi0, horizon, 7);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    REQUIRE(again[i].rates == suite[i].rates);
  }
  const auto other = random_strategy_suite(50, phi0, horizon, 8);
  bool any_different = false;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (other[i].rates != suite[i].rates) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("dominated pairs never let the slower strategy sell faster") {
  const auto pairs = random_dominated_pairs(100, 10.0, 1.0, 12345);
  REQUIRE(pairs.size() == 100);
  for (const StrategyPair& pair : pairs) {
    CHECK_NOTHROW(pair.slower.validate());
    CHECK_NOTHROW(pair.faster.validate());
    REQUIRE(pair.slower.rates.size() == pair.faster.rates.size());
    for (std::size_t i = 0; i < pair.slower.rates.size(); ++i) {
      CHECK(pair.slower.rates[i] <= pair.faster.rates[i]);
    }
    CHECK(pair.faster.total_sold() <= 10.0 + 1e-12);
  }
}

TEST_CASE("noisy versus averaged clock comparison rows") {
  SimConfig base;
  base.market = MarketSpec::from_mu_tilde(0.05, 0.1);
  base.impact = ImpactSpec{2, 0.01};
  base.noise = SubordinatorSpec{1.0, 1.0, 2.0};
  base.phi0 = 10.0;
  base.horizon = 1.0;
  base.steps = 50;
  base.mode = MiMode::random;

  std::vector<Strategy> strategies{Strategy::zero(1.0), Strategy::constant(8.0, 1.0)};
  const auto rows = compare_random_vs_deterministic(strategies, base, 2000, 99);
  REQUIRE(rows.size() == 2);

  // Selling nothing: both sides are exactly the initial cash.
  CHECK(rows[0].mc_random == 0.0);
  CHECK(rows[0].mc_random_se == 0.0);
  CHECK(rows[0].deterministic_value == 0.0);
  CHECK(rows[0].inequality_holds);

  // A real sale: the noisy clock can only help a risk-neutral seller.
  CHECK(rows[1].inequality_holds);
  CHECK(rows[1].mc_random > 0.0);
  CHECK(rows[1].deterministic_value > 0.0);
  CHECK(rows[1].mc_random + 3.0 * rows[1].mc_random_se >= rows[1].deterministic_value);
}

TEST_CASE("scenario registry lists every reproduction and rejects strangers") {
  const auto names = scenario_names();
  const std::vector<std::string> expected{
      "fixed-gamma-phi1",       "fixed-gamma-phi10",     "fixed-gamma-phi100",
      "fixed-gamma-tilde-phi100", "fixed-gamma-tilde-tc",  "linear-invariance",
      "random-vs-deterministic"};
  CHECK(names == expected);

  ScenarioRequest req;
  req.name = "does-not-exist";
  try {
    run_scenario(req);
    FAIL("expected UnknownScenarioError");
  } catch (const UnknownScenarioError& e) {
    CHECK(e.known == names);
  }
}

TEST_CASE("scenario outputs are deterministic across reruns and thread counts") {
  TempDir a("scenario_a"), b("scenario_b"), c("scenario_c");

  ScenarioRequest req;
  req.name = "random-vs-deterministic";
  req.seed = 5;
  req.paths = 400;  // keep the smoke run quick; the full default is exercised by acceptance
  req.out_dir = a.path.string();
  req.threads = 1;
  const ScenarioResult ra = run_scenario(req);
  REQUIRE_FALSE(ra.files.empty());
  REQUIRE_FALSE(ra.summary.empty());
  CHECK(ra.name == req.name);

  req.out_dir = b.path.string();
  req.threads = 4;
  const ScenarioResult rb = run_scenario(req);

  req.out_dir = c.path.string();
  req.threads = 0;
  const ScenarioResult rc = run_scenario(req);

  REQUIRE(ra.files.size() == rb.files.size());
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    const std::string bytes = read_bytes(ra.files[i]);
    CHECK(bytes == read_bytes(rb.files[i]));
    CHECK(bytes == read_bytes(rc.files[i]));
    CHECK(bytes.rfind("# impactflow", 0) == 0);
  }
  CHECK(ra.summary == rb.summary);
  CHECK(ra.summary == rc.summary);
}

TEST_CASE("dynamic-program scenario writes schedules, trajectories and values") {
  TempDir dir("scenario_dp");
  ScenarioRequest req;
  req.name = "fixed-gamma-phi1";
  req.out_dir = dir.path.string();
  req.seed = 1;
  const ScenarioResult r = run_scenario(req);

  // Three family members, three CSVs each.
  CHECK(r.files.size() == 9);
  for (const std::string& f : r.files) {
    CHECK(fs::exists(f));
    const std::string bytes = read_bytes(f);
    CHECK(bytes.rfind("# impactflow", 0) == 0);
    CHECK(bytes.find("# seed=") != std::string::npos);
    CHECK(bytes.find("# config_hash=") != std::string::npos);
  }
  // Summary reports one line per member plus the terminal monotonicity line.
  REQUIRE(r.summary.size() >= 4);
  bool found_alpha0 = false, found_alpha3 = false;
  for (const std::string& line : r.summary) {
    if (line.rfind("alpha1=0", 0) == 0) found_alpha0 = true;
    if (line.rfind("alpha1=3", 0) == 0) found_alpha3 = true;
  }
  CHECK(found_alpha0);
  CHECK(found_alpha3);
}
