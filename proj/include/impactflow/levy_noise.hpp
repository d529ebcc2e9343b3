#pragma once

#include <cstdint>

#include "impactflow/rng.hpp"

namespace impactflow {

// ===== Driving noise of the impact clock =====
//
// The cumulative impact clock is the subordinator
//
//   L_t = gamma * t + J_t,     J_t ~ Gamma(shape = alpha1 * t, scale = beta1),
//
// i.e. a deterministic drift plus a Gamma process.  Jump sizes arrive with
// Levy measure nu(dz) = (alpha1 / z) * exp(-z / beta1) dz on (0, inf).

/// Parameters of the subordinator.  alpha1 = 0 degenerates to the
/// deterministic clock L_t = gamma * t.
struct SubordinatorSpec {
  double gamma = 1.0;   ///< drift rate, >= 0 (per unit time)
  double alpha1 = 0.0;  ///< Gamma shape rate, >= 0 (per unit time)
  double beta1 = 2.0;   ///< Gamma scale, > 0

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Closed-form moment bundle of the subordinator.
struct LevyMoments {
  double mean_rate;      ///< E[L_1] = gamma + alpha1 * beta1
  double variance_rate;  ///< Var[L_1] = alpha1 * beta1^2 (jump part only)
  double norm1;          ///< integral of z nu(dz) = alpha1 * beta1
  double norm2;          ///< sqrt of integral of z^2 nu(dz) = beta1 * sqrt(alpha1)
};

LevyMoments moments(const SubordinatorSpec& spec);

/// Laplace exponent psi(lambda) with E[exp(-lambda L_t)] = exp(-t psi(lambda)):
///   psi(lambda) = gamma * lambda + alpha1 * log(1 + beta1 * lambda).
/// Rejects lambda < 0.
double laplace_exponent(const SubordinatorSpec& spec, double lambda);

/// Exact Gamma(shape, scale) draw, valid for every shape > 0 including
/// shape << 1 (the discrete execution model uses shapes like alpha1 / n with
/// n = 500).  Marsaglia-Tsang squeeze for shape >= 1; for shape < 1 the draw
/// is boosted via G_a = G_{a+1} * U^{1/a}.
double gamma_sample(RngStream& stream, double shape, double scale);

/// One increment of L over a window dt > 0:
///   gamma * dt + Gamma(alpha1 * dt, beta1).
/// Always >= gamma * dt.  Rejects dt <= 0.
double sample_increment(const SubordinatorSpec& spec, double dt, RngStream& stream);

/// Per-step impact factor of the n-step discrete model:
///   gamma + Gamma(alpha1 / n, n * beta1).
/// Equal in law to n times the increment of L over a window 1/n; both
/// parameterizations are exposed because consumers state them differently.
double sample_step_factor(const SubordinatorSpec& spec, std::int64_t n, RngStream& stream);

}  // namespace impactflow
