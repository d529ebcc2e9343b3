#pragma once

#include <functional>

#include "impactflow/levy_noise.hpp"

namespace impactflow {

// ===== Impact function algebra and closed-form values =====

/// Power-law market impact on the log-price: selling at rate zeta pushes the
/// log-price down by g(zeta) per unit of the impact clock L.
struct ImpactSpec {
  int p = 2;             ///< impact exponent, 1 (linear) or 2 (quadratic)
  double alpha0 = 0.01;  ///< impact scale, > 0

  void validate() const;

  /// g(zeta) = alpha0 * zeta^p; convex, non-decreasing, g(0) = 0.
  double g(double zeta) const;

  /// Marginal impact h(zeta) = g'(zeta) = p * alpha0 * zeta^(p-1).
  double h(double zeta) const;

  /// Limit of h at infinity: alpha0 for p = 1, +infinity for p = 2.  Finite
  /// marginal impact is what makes instantaneous block sales meaningful.
  double h_limit() const;
};

/// Effective decay rate of the expected discounted proceeds: selling at rate
/// zeta makes E[exp(X_t)] decay at rate q(zeta) = mu_tilde + g_hat(zeta),
/// where g_hat folds the noise of the impact clock through its Laplace
/// exponent.
struct EffectiveDecay {
  double mu_tilde = 0.05;  ///< risk-adjusted drift mu - sigma^2/2, > 0
  ImpactSpec impact;
  SubordinatorSpec noise;

  void validate() const;

  /// g_hat(zeta) = gamma * g(zeta) + alpha1 * log(1 + beta1 * g(zeta)).
  /// For p = 2 this is gamma*alpha0*zeta^2 + alpha1*log(alpha0*beta1*zeta^2 + 1).
  double g_hat(double zeta) const;

  double q(double zeta) const { return mu_tilde + g_hat(zeta); }
};

/// Discounted proceeds of an instantaneous block sale of size psi at unit
/// price when the log-price decays at `rate` per unit sold:
///   (1 - exp(-rate * psi)) / rate,  defined by continuity as psi at rate = 0.
/// Evaluated by a series branch below rate * psi < 1e-8 to avoid cancellation.
double decayed_proceeds(double psi, double rate);

/// Value of the best instantaneous partial block sale, the t -> 0 limit of
/// the execution problem when the marginal impact stays bounded:
///
///   sup over psi in [0, phi] of
///     u(w + decayed_proceeds(psi, c) * s, phi - psi, s * exp(-c * psi)),
///
/// with c = gamma_h_inf = gamma * h_limit().  When c = 0 the sale is
/// frictionless: sup_psi u(w + psi * s, phi - psi, s).
///
/// The supremum is located by a 4097-point grid scan over psi followed by
/// golden-section refinement of the bracketing cell (tolerance 1e-10 in psi);
/// u need not be concave.
double block_sale_limit_value(const std::function<double(double, double, double)>& u,
                              double w, double phi, double s, double gamma_h_inf);

/// Exact risk-neutral value under linear impact (p = 1):
///   w + (1 - exp(-gamma*alpha0*phi)) / (gamma*alpha0) * s.
/// Independent of the horizon and of the jump parameters (alpha1, beta1);
/// the gamma*alpha0 -> 0 limit returns w + phi*s by continuity.
double linear_impact_value(double w, double phi, double s, double gamma, double alpha0);

/// Value under the sell-off constraint for a scalar utility U of terminal
/// cash (U concave and non-decreasing, price drift non-positive):
///   U(w + (1 - exp(-gamma*alpha0*phi)) / (gamma*alpha0) * s).
double linear_sell_off_value(const std::function<double(double)>& U,
                             double w, double phi, double s, double gamma, double alpha0);

/// Drift-domination gate for the dynamic program: gamma >= alpha1 * beta1 / 8.
/// This is exactly the condition under which g_hat stays convex for p = 2, so
/// the risk-neutral problem reduces to a deterministic control problem.
bool drift_condition_holds(const SubordinatorSpec& spec);

/// Sufficient convexity condition used by the viscosity characterization of
/// the reduced problem: gamma >= alpha1 / 2.
bool convexity_condition_holds(const SubordinatorSpec& spec);

}  // namespace impactflow
