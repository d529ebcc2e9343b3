#include "impactflow/levy_noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace impactflow {

void SubordinatorSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("SubordinatorSpec: gamma must be finite and >= 0, got " + std::to_string(gamma));
  }
  if (!(alpha1 >= 0.0) || !std::isfinite(alpha1)) {
    throw std::invalid_argument("SubordinatorSpec: alpha1 must be finite and >= 0, got " + std::to_string(alpha1));
  }
  if (!(beta1 > 0.0) || !std::isfinite(beta1)) {
    throw std::invalid_argument("SubordinatorSpec: beta1 must be finite and > 0, got " + std::to_string(beta1));
  }
}

LevyMoments moments(const SubordinatorSpec& spec) {
  spec.validate();
  LevyMoments m;
  m.norm1 = spec.alpha1 * spec.beta1;
  m.norm2 = spec.beta1 * std::sqrt(spec.alpha1);
  m.mean_rate = spec.gamma + m.norm1;
  m.variance_rate = spec.alpha1 * spec.beta1 * spec.beta1;
  return m;
}

double laplace_exponent(const SubordinatorSpec& spec, double lambda) {
  spec.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("laplace_exponent: lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
  return spec.gamma * lambda + spec.alpha1 * std::log1p(spec.beta1 * lambda);
}

double gamma_sample(RngStream& stream, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("gamma_sample: shape and scale must be > 0");
  }
  // Shapes below 1 are lifted to shape + 1 and corrected by U^{1/shape}.
  // For very small shapes the correction factor underflows toward 0, which is
  // the correctly rounded value of the astronomically small true draw.
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(stream.next_unit(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = stream.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.next_unit();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v * scale;
  }
}

double sample_increment(const SubordinatorSpec& spec, double dt, RngStream& stream) {
  spec.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("sample_increment: dt must be finite and > 0, got " + std::to_string(dt));
  }
  const double drift = spec.gamma * dt;
  if (spec.alpha1 == 0.0) return drift;
  return drift + gamma_sample(stream, spec.alpha1 * dt, spec.beta1);
}

double sample_step_factor(const SubordinatorSpec& spec, std::int64_t n, RngStream& stream) {
  spec.validate();
  if (n < 1) {
    throw std::invalid_argument("sample_step_factor: n must be >= 1, got " + std::to_string(n));
  }
  if (spec.alpha1 == 0.0) return spec.gamma;
  const double dn = static_cast<double>(n);
  return spec.gamma + gamma_sample(stream, spec.alpha1 / dn, dn * spec.beta1);
}

}  // namespace impactflow
