#pragma once

#include <cmath>
#include <utility>

namespace impactflow::detail {

/// Golden-section maximization of f on [lo, hi] down to an interval of width
/// xtol.  Assumes f is unimodal on the bracket; when it is not, the result is
/// still one of the evaluated points, never worse than max(f(lo), f(hi)) seen.
/// Returns {argmax, max}.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double xtol) {
  constexpr double invphi = 0.6180339887498949;         // 1/phi
  constexpr double invphi2 = 0.3819660112501051;        // 1/phi^2
  double best_x = lo, best_v = f(lo);
  const double vhi = f(hi);
  if (vhi > best_v) { best_x = hi; best_v = vhi; }
  double a = lo, b = hi;
  double x1 = a + invphi2 * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 >= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = a + invphi2 * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 > best_v) { best_x = x1; best_v = f1; }
  if (f2 > best_v) { best_x = x2; best_v = f2; }
  return {best_x, best_v};
}

}  // namespace impactflow::detail
