#pragma once

#include "orlicz.hpp"
#include "spectral.hpp"

namespace subsample {

// Truncated cardinal-series sampling scheme: samples are taken at t_k =
// k pi / omega for k = -n..n and the signal is assumed to carry most of its
// spectral mass inside [-lambda_band, lambda_band] with lambda_band < omega.
struct SamplingScheme {
  double omega = 0.0;
  long long n = 0;
  double lambda_band = 0.0;

  void validate() const;  // throws ValidityError naming the failed condition
};

// Root-mean-square error bound split into its constituents:
//   total = sqrt(c_value) / n + d_value * sqrt(tail).
struct BoundBreakdown {
  double z_used = 0.0;
  double c_value = 0.0;
  double d_value = 0.0;
  double tail = 0.0;
  double total = 0.0;
  bool valid = false;
};

// Si(pi) = int_0^pi sin(x)/x dx, evaluated once and cached.
double sine_integral_pi();

// Constant of the truncation term. Requires z in (0, 1) and
// n >= omega t / (pi sqrt(z)); both z-dependent factors increase with z.
double truncation_constant(double t, const SamplingScheme& scheme,
                           const SpectralModel& model, double z);

// Factor multiplying the square root of the out-of-band spectral mass.
// Requires n > omega t / pi. Always >= 2; equals 2 when sin(omega t) = 0.
double tail_factor(double t, const SamplingScheme& scheme);

// Pointwise RMS error bound at time t with an explicit interpolation
// parameter z.
BoundBreakdown pointwise_bound(double t, const SamplingScheme& scheme,
                               const SpectralModel& model, double z);

// Same, choosing the smallest admissible z = (omega t / (pi n))^2 (clamped
// away from 0), which minimizes the bound since the constant increases in z
// and the tail factor does not depend on it.
BoundBreakdown pointwise_bound_auto(double t, const SamplingScheme& scheme,
                                    const SpectralModel& model);

// Uniform-in-time bound over [0, T]: the truncation constant is evaluated at
// t = T with z* = (omega T / (pi n))^2 and the oscillating factor in the
// tail term is replaced by its envelope.
BoundBreakdown uniform_bound(double T, const SamplingScheme& scheme,
                             const SpectralModel& model);

struct LpBound {
  double value = 0.0;
  double quad_error = 0.0;
};

// c_x^p * int_0^T pointwise_bound_auto(t)^p dt by adaptive quadrature.
LpBound lp_bound(const SamplingScheme& scheme, const SpectralModel& model,
                 double T, double p, double c_x);

// Conservative closed form c_x^p * T * uniform_bound(T)^p; always dominates
// lp_bound on the same inputs.
double lp_bound_upper(const SamplingScheme& scheme, const SpectralModel& model,
                      double T, double p, double c_x);

// Infimum of the epsilons for which the reliability bound below applies,
// i.e. the solution of epsilon = S * (f(p (S/epsilon)^{1/p}))^p where f is
// the family density. Power family: S * p^{(alpha-1) p / alpha}.
double validity_threshold(double S, double p, const NFunction& family);

struct TailProbability {
  double raw = 0.0;      // 2 exp(-phi*((epsilon/S)^{1/p}))
  double clamped = 0.0;  // min(1, raw)
};

// Reliability bound P{ int_0^T |error|^p > epsilon } <= raw, valid only for
// epsilon above validity_threshold(S, p, family).
TailProbability tail_probability(double epsilon, double S, double p,
                                 const NFunction& family);

}  // namespace subsample
