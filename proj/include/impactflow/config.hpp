#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "impactflow/dp_solver.hpp"
#include "impactflow/market_sim.hpp"

namespace impactflow {

/// FNV-1a 64-bit hash; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);

/// One flat configuration for every command, parsed from key = value lines
/// grouped in named sections.  Unknown sections, unknown keys, duplicate
/// keys, and malformed numbers are rejected with the offending line.
///
///   [market]   sigma, mu_tilde, bound, horizon
///   [impact]   p, alpha0
///   [noise]    gamma, alpha1, beta1
///   [dp]       n, phi0, grid_m
///   [mc]       paths, steps, mode (random | deterministic)
///   [strategy] kind (near-block | constant | zero | file), psi, delta, rate, file
///   [value]    w, s
///   [io]       plots (true | false), values_stride
struct RunConfig {
  // [market]
  double sigma = 0.1;
  double mu_tilde = 0.05;
  double bound = 16.0;
  double horizon = 1.0;
  // [impact]
  int p = 2;
  double alpha0 = 0.01;
  // [noise]
  SubordinatorSpec noise;
  // [dp]
  std::int64_t n = 500;
  double phi0 = 1.0;
  std::int64_t grid_m = 0;
  // [mc]
  std::int64_t paths = 10000;
  std::int64_t steps = 500;
  MiMode mode = MiMode::random;
  // [strategy]
  std::string strategy_kind = "near-block";
  double strategy_psi = 1.0;
  double strategy_delta = 1e-3;
  double strategy_rate = 1.0;
  std::string strategy_file;
  // [value]
  double w = 0.0;
  double s = 1.0;
  // [io]
  bool plots = false;
  std::int64_t values_stride = 0;  ///< 0 = auto (about 50 rows per axis)

  /// Every field as a sorted "section.key=value" listing; the config hash
  /// recorded in output headers is the FNV-1a of this dump, so equal
  /// resolved configs hash equal regardless of formatting in the file.
  std::string canonical_dump() const;
  std::uint64_t hash() const { return fnv1a64(canonical_dump()); }

  MarketSpec market_spec() const;
  ImpactSpec impact_spec() const;
  SimConfig sim_config() const;
  DpParams dp_params() const;

  /// Builds the configured strategy; kind "file" loads strategy_file.
  Strategy strategy() const;
};

/// Parse configuration text; `origin` names the source in error messages.
/// Throws ConfigError.
RunConfig parse_config_text(std::string_view text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

/// Piecewise-constant strategy from a CSV of rows "t,zeta": rate zeta applies
/// from time t until the next row's t (the last row until the horizon).
/// Comment lines (# or ;) and a header row are skipped.  Throws ConfigError
/// on parse failures, StrategyError on inadmissible content.
Strategy load_strategy_csv(const std::string& path, double horizon);

}  // namespace impactflow
