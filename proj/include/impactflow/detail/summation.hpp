#pragma once

#include <cmath>

namespace impactflow::detail {

/// Neumaier compensated accumulator: order-stable summation with error
/// carried in a second double.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace impactflow::detail
