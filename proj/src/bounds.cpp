#include "bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace subsample {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZFloor = 1e-12;
constexpr double kZCeilingMargin = 1e-9;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::domain_error("t must be finite and >= 0, got " + num(t));
  }
}

}  // namespace

void SamplingScheme::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ValidityError("scheme: omega > 0 violated, omega = " + num(omega));
  }
  if (n < 1) {
    throw ValidityError("scheme: n >= 1 violated, n = " + std::to_string(n));
  }
  if (!(lambda_band > 0.0) || !(lambda_band < omega)) {
    throw ValidityError("scheme: 0 < lambda_band < omega violated, lambda_band = " +
                        num(lambda_band) + ", omega = " + num(omega));
  }
}

double sine_integral_pi() {
  static const double value = [] {
    QuadratureOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-14;
    return integrate(
               [](double x) {
                 if (std::fabs(x) < 1e-8) return 1.0 - x * x / 6.0;
                 return std::sin(x) / x;
               },
               0.0, kPi, opt)
        .value;
  }();
  return value;
}

double truncation_constant(double t, const SamplingScheme& scheme,
                           const SpectralModel& model, double z) {
  require_time(t);
  scheme.validate();
  if (!(z > 0.0) || !(z < 1.0)) {
    throw ValidityError("z in (0, 1) violated, z = " + num(z));
  }
  // The condition is closed, so admit n within a few ulps of the boundary;
  // sqrt((omega t / (pi n))^2) can land one ulp above omega t / (pi n).
  const double min_n = scheme.omega * t / (kPi * std::sqrt(z));
  if (static_cast<double>(scheme.n) <
      min_n * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())) {
    throw ValidityError("n >= omega*t/(pi*sqrt(z)) violated: n = " +
                        std::to_string(scheme.n) +
                        ", omega*t/(pi*sqrt(z)) = " + num(min_n));
  }
  const double b0 = model.variance();
  const double one_minus_z = 1.0 - z;
  const double term1 = 4.0 * scheme.omega * t / (kPi * kPi * one_minus_z);
  const double term2 =
      4.0 * (z + 1.0 + 1.0 / static_cast<double>(scheme.n)) /
      (kPi * one_minus_z * one_minus_z * (1.0 - scheme.lambda_band / scheme.omega));
  const double sum = term1 + term2;
  return b0 * sum * sum;
}

double tail_factor(double t, const SamplingScheme& scheme) {
  require_time(t);
  scheme.validate();
  const double ratio = scheme.omega * t / kPi;
  if (!(static_cast<double>(scheme.n) > ratio)) {
    throw ValidityError("n > omega*t/pi violated: n = " +
                        std::to_string(scheme.n) + ", omega*t/pi = " +
                        num(ratio));
  }
  return 2.0 + (2.0 * std::fabs(std::sin(scheme.omega * t)) / kPi) *
                   (1.0 + sine_integral_pi() +
                    (ratio + 0.5) / (static_cast<double>(scheme.n) - ratio));
}

BoundBreakdown pointwise_bound(double t, const SamplingScheme& scheme,
                               const SpectralModel& model, double z) {
  BoundBreakdown out;
  out.z_used = z;
  out.c_value = truncation_constant(t, scheme, model, z);
  out.d_value = tail_factor(t, scheme);
  out.tail = model.tail_mass(scheme.lambda_band);
  out.total = std::sqrt(out.c_value) / static_cast<double>(scheme.n) +
              out.d_value * std::sqrt(out.tail);
  out.valid = true;
  return out;
}

BoundBreakdown pointwise_bound_auto(double t, const SamplingScheme& scheme,
                                    const SpectralModel& model) {
  require_time(t);
  scheme.validate();
  const double ratio = scheme.omega * t / (kPi * static_cast<double>(scheme.n));
  const double z_raw = ratio * ratio;
  if (!(z_raw <= 1.0 - kZCeilingMargin)) {
    throw ValidityError(
        "no admissible z: requires n > omega*t/pi with margin, got n = " +
        std::to_string(scheme.n) + ", omega*t/pi = " +
        num(scheme.omega * t / kPi));
  }
  // Nudge above the exact minimizer so n >= omega*t/(pi*sqrt(z)) survives
  // rounding when the inequality is tight.
  const double z =
      std::max(z_raw * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()),
               kZFloor);
  return pointwise_bound(t, scheme, model, z);
}

BoundBreakdown uniform_bound(double T, const SamplingScheme& scheme,
                             const SpectralModel& model) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::domain_error("T must be finite and > 0, got " + num(T));
  }
  scheme.validate();
  const double ratio = scheme.omega * T / kPi;
  const double z_star =
      (ratio / static_cast<double>(scheme.n)) * (ratio / static_cast<double>(scheme.n));
  if (!(z_star < 1.0)) {
    const long long n_min = static_cast<long long>(std::ceil(ratio)) + 1;
    throw ValidityError(
        "z* = omega^2*T^2/(pi^2*n^2) in (0,1) violated: z* = " + num(z_star) +
        "; smallest admissible n = ceil(omega*T/pi)+1 = " +
        std::to_string(n_min));
  }

  BoundBreakdown out;
  out.z_used = z_star;
  // Same truncation constant as the pointwise bound at t = T, z = z*;
  // assembled directly because n >= omega*T/(pi*sqrt(z*)) holds with
  // equality by construction.
  const double b0 = model.variance();
  const double one_minus_z = 1.0 - z_star;
  const double term1 = 4.0 * scheme.omega * T / (kPi * kPi * one_minus_z);
  const double term2 =
      4.0 * (z_star + 1.0 + 1.0 / static_cast<double>(scheme.n)) /
      (kPi * one_minus_z * one_minus_z *
       (1.0 - scheme.lambda_band / scheme.omega));
  const double sum = term1 + term2;
  out.c_value = b0 * sum * sum;
  // Oscillating factor replaced by its envelope |sin| <= 1.
  out.d_value = 2.0 + (2.0 / kPi) * (1.0 + sine_integral_pi() +
                                     (ratio + 0.5) /
                                         (static_cast<double>(scheme.n) - ratio));
  out.tail = model.tail_mass(scheme.lambda_band);
  out.total = std::sqrt(out.c_value) / static_cast<double>(scheme.n) +
              out.d_value * std::sqrt(out.tail);
  out.valid = true;
  return out;
}

LpBound lp_bound(const SamplingScheme& scheme, const SpectralModel& model,
                 double T, double p, double c_x) {
  if (!(T > 0.0)) throw std::domain_error("T must be > 0");
  if (!(p >= 1.0)) throw std::domain_error("p must be >= 1");
  if (!(c_x > 0.0)) throw std::domain_error("c_x must be > 0");
  scheme.validate();
  // The pointwise bound must exist on all of [0, T].
  (void)uniform_bound(T, scheme, model);

  const auto integrand = [&](double t) {
    return std::pow(pointwise_bound_auto(t, scheme, model).total, p);
  };

  // Pre-split at the kinks of |sin(omega t)| so the adaptive rule sees
  // smooth pieces; cap the number of splits for very large omega.
  const double kink_spacing = kPi / scheme.omega;
  long long kinks = static_cast<long long>(std::floor(T / kink_spacing));
  double width = kink_spacing;
  if (kinks > 2048) {
    kinks = 2048;
    width = T / 2049.0;
  }

  QuadratureOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-8;

  double value = 0.0;
  double err = 0.0;
  double lo = 0.0;
  for (long long i = 0; i <= kinks; ++i) {
    const double hi = (i == kinks) ? T : (static_cast<double>(i) + 1.0) * width;
    if (!(hi > lo)) continue;
    const QuadratureResult r = integrate(integrand, lo, hi, opt);
    if (!r.converged) {
      throw NumericError(
          "lp_bound: quadrature did not converge, residual estimate " +
              std::to_string(r.error_estimate),
          r.error_estimate);
    }
    value += r.value;
    err += r.error_estimate;
    lo = hi;
  }

  const double scale = std::pow(c_x, p);
  LpBound out;
  out.value = scale * value;
  out.quad_error = scale * err;
  return out;
}

double lp_bound_upper(const SamplingScheme& scheme, const SpectralModel& model,
                      double T, double p, double c_x) {
  if (!(p >= 1.0)) throw std::domain_error("p must be >= 1");
  if (!(c_x > 0.0)) throw std::domain_error("c_x must be > 0");
  const BoundBreakdown u = uniform_bound(T, scheme, model);
  return std::pow(c_x, p) * T * std::pow(u.total, p);
}

double validity_threshold(double S, double p, const NFunction& family) {
  if (!(S > 0.0)) throw std::domain_error("S must be > 0");
  if (!(p >= 1.0)) throw std::domain_error("p must be >= 1");
  if (const auto alpha = family.power_alpha()) {
    return S * std::pow(p, (*alpha - 1.0) * p / *alpha);
  }

  // Generic family: the right-hand side S*(f(p (S/eps)^{1/p}))^p decreases
  // in eps, so eps - rhs(eps) is increasing; bracket and bisect.
  const auto rhs = [&](double eps) {
    return S * std::pow(family.density(p * std::pow(S / eps, 1.0 / p)), p);
  };
  const auto h = [&](double eps) { return eps - rhs(eps); };

  double lo = S;
  int guard = 0;
  while (h(lo) > 0.0) {
    lo *= 0.25;
    if (++guard > 2400 || lo < 1e-300) return 0.0;
  }
  double hi = std::max(S, lo * 4.0);
  guard = 0;
  while (h(hi) <= 0.0) {
    hi *= 4.0;
    if (++guard > 600 || hi > 1e300) {
      throw NumericError("validity_threshold: no finite bracket, h(" +
                         num(hi) + ") <= 0");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TailProbability tail_probability(double epsilon, double S, double p,
                                 const NFunction& family) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  const double threshold = validity_threshold(S, p, family);
  if (!(epsilon > threshold)) {
    throw ValidityError(
        "epsilon > S*(f(p*(S/epsilon)^(1/p)))^p violated: epsilon = " +
        num(epsilon) + " is at or below the validity threshold " +
        num(threshold));
  }
  TailProbability out;
  out.raw = 2.0 * std::exp(-family.conjugate(std::pow(epsilon / S, 1.0 / p)));
  out.clamped = std::min(1.0, out.raw);
  return out;
}

}  // namespace subsample
