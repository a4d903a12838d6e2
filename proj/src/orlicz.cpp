#include "orlicz.hpp"

#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace subsample {

namespace {
constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
}

double NFunction::conjugate(double x) const {
  // Fallback: widen the search radius until the maximizer is interior.
  double radius = 1.0;
  for (int i = 0; i < 200; ++i) {
    const NumericConjugate c = conjugate_numeric(*this, x, radius);
    if (!c.boundary) return c.value;
    radius *= 2.0;
  }
  throw NumericError("conjugate: maximizer not bracketed by any radius");
}

PowerFamily::PowerFamily(double alpha) : alpha_(alpha) {
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("PowerFamily: alpha must lie in (1, 2]");
  }
  gamma_ = alpha / (alpha - 1.0);
}

double PowerFamily::phi(double x) const {
  return std::pow(std::fabs(x), alpha_) / alpha_;
}

double PowerFamily::density(double x) const {
  if (x < 0.0) {
    throw std::domain_error("PowerFamily::density: x must be >= 0");
  }
  return std::pow(x, alpha_ - 1.0);
}

double PowerFamily::conjugate(double x) const {
  return std::pow(std::fabs(x), gamma_) / gamma_;
}

NumericConjugate conjugate_numeric(const std::function<double(double)>& phi,
                                   double x, double radius) {
  if (!(radius > 0.0)) {
    throw std::domain_error("conjugate_numeric: radius must be positive");
  }
  const auto objective = [&](double y) { return x * y - phi(y); };

  // Golden-section search for the maximum of a concave objective.
  double a = -radius;
  double b = radius;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  const double tol = 1e-10 * radius;
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
    if (c >= d) break;  // interval exhausted at double precision
  }
  const double y_star = 0.5 * (a + b);

  NumericConjugate out;
  out.value = objective(y_star);
  out.boundary = std::fabs(y_star) >= radius * (1.0 - 1e-6);
  // Never report less than the value at the origin (objective(0) = 0 for an
  // N-function), which also clips tiny negative round-off.
  if (out.value < 0.0 && objective(0.0) == 0.0) out.value = 0.0;
  return out;
}

NumericConjugate conjugate_numeric(const NFunction& family, double x,
                                   double radius) {
  return conjugate_numeric([&family](double y) { return family.phi(y); }, x,
                           radius);
}

}  // namespace subsample
