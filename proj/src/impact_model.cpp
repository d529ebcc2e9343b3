#include "impactflow/impact_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "impactflow/detail/golden.hpp"

namespace impactflow {

void ImpactSpec::validate() const {
  if (p != 1 && p != 2) {
    throw std::invalid_argument("ImpactSpec: p must be 1 or 2, got " + std::to_string(p));
  }
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw std::invalid_argument("ImpactSpec: alpha0 must be finite and > 0, got " + std::to_string(alpha0));
  }
}

double ImpactSpec::g(double zeta) const {
  return p == 1 ? alpha0 * zeta : alpha0 * zeta * zeta;
}

double ImpactSpec::h(double zeta) const {
  return p == 1 ? alpha0 : 2.0 * alpha0 * zeta;
}

double ImpactSpec::h_limit() const {
  return p == 1 ? alpha0 : std::numeric_limits<double>::infinity();
}

void EffectiveDecay::validate() const {
  impact.validate();
  noise.validate();
  if (!(mu_tilde > 0.0) || !std::isfinite(mu_tilde)) {
    throw std::invalid_argument("EffectiveDecay: mu_tilde must be finite and > 0, got " + std::to_string(mu_tilde));
  }
}

double EffectiveDecay::g_hat(double zeta) const {
  return laplace_exponent(noise, impact.g(zeta));
}

double decayed_proceeds(double psi, double rate) {
  const double x = rate * psi;
  if (x < 1e-8) {
    // Series of (1 - e^{-x})/x, accurate to below 1e-24 here.
    return psi * (1.0 - 0.5 * x + x * x / 6.0);
  }
  return -std::expm1(-x) / rate;
}

double block_sale_limit_value(const std::function<double(double, double, double)>& u,
                              double w, double phi, double s, double gamma_h_inf) {
  if (!(phi >= 0.0)) throw std::invalid_argument("block_sale_limit_value: phi must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("block_sale_limit_value: s must be >= 0");
  if (!(gamma_h_inf >= 0.0) || !std::isfinite(gamma_h_inf)) {
    throw std::invalid_argument("block_sale_limit_value: gamma_h_inf must be finite and >= 0");
  }
  const auto objective = [&](double psi) {
    return u(w + decayed_proceeds(psi, gamma_h_inf) * s, phi - psi, s * std::exp(-gamma_h_inf * psi));
  };
  if (phi == 0.0) return objective(0.0);

  constexpr int kScanPoints = 4097;
  const double step = phi / (kScanPoints - 1);
  double best_psi = 0.0;
  double best_val = objective(0.0);
  for (int i = 1; i < kScanPoints; ++i) {
    const double psi = (i == kScanPoints - 1) ? phi : i * step;
    const double v = objective(psi);
    if (v > best_val) { best_val = v; best_psi = psi; }
  }
  const double lo = std::max(0.0, best_psi - step);
  const double hi = std::min(phi, best_psi + step);
  const auto [rx, rv] = detail::golden_max(objective, lo, hi, 1e-10);
  return rv > best_val ? rv : best_val;
}

double linear_impact_value(double w, double phi, double s, double gamma, double alpha0) {
  if (!(phi >= 0.0)) throw std::invalid_argument("linear_impact_value: phi must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("linear_impact_value: s must be >= 0");
  if (!(gamma >= 0.0) || !(alpha0 > 0.0)) {
    throw std::invalid_argument("linear_impact_value: gamma must be >= 0 and alpha0 > 0");
  }
  return w + decayed_proceeds(phi, gamma * alpha0) * s;
}

double linear_sell_off_value(const std::function<double(double)>& U,
                             double w, double phi, double s, double gamma, double alpha0) {
  if (!(phi >= 0.0)) throw std::invalid_argument("linear_sell_off_value: phi must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("linear_sell_off_value: s must be >= 0");
  if (!(gamma >= 0.0) || !(alpha0 > 0.0)) {
    throw std::invalid_argument("linear_sell_off_value: gamma must be >= 0 and alpha0 > 0");
  }
  return U(w + decayed_proceeds(phi, gamma * alpha0) * s);
}

bool drift_condition_holds(const SubordinatorSpec& spec) {
  spec.validate();
  return spec.gamma >= spec.alpha1 * spec.beta1 / 8.0;
}

bool convexity_condition_holds(const SubordinatorSpec& spec) {
  spec.validate();
  return spec.gamma >= spec.alpha1 / 2.0;
}

}  // namespace impactflow
