#pragma once

namespace subsample {

// Kahan compensated accumulator for long sums of mixed-sign terms.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) noexcept {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const noexcept { return sum; }
};

}  // namespace subsample
