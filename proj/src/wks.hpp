#pragma once

#include <memory>
#include <vector>

#include "bounds.hpp"
#include "spectral.hpp"

namespace subsample {

// Cardinal-series kernel sin(u)/u at u = omega*t - k*pi, with a two-term
// Taylor expansion near the removable singularity.
double sinc_kernel(double omega, double t, long long k);

// Samples value_k = x(k pi / omega) for k = -n..n; values[0] holds k = -n.
struct SampleSet {
  double omega = 0.0;
  long long n = 0;
  std::vector<double> values;

  void validate() const;
};

// Truncated cardinal series at time t, accumulated with compensation.
double reconstruct(const SampleSet& samples, double t);
std::vector<double> reconstruct_grid(const SampleSet& samples,
                                     const std::vector<double>& grid);

// Mean-square reconstruction error of the truncated cardinal series applied
// to the model's samples:
//   B(0) - 2 sum_k s_k(t) B(t - t_k) + sum_{k,j} s_k(t) s_j(t) B(t_k - t_j).
// The sample Gram reduces to lags B(m pi / omega) by stationarity; they are
// computed once per (scheme, model) and reused across evaluation times.
class ExactMseEvaluator {
 public:
  ExactMseEvaluator(const SamplingScheme& scheme,
                    std::shared_ptr<const SpectralModel> model);
  double operator()(double t) const;

  const SamplingScheme& scheme() const noexcept { return scheme_; }

 private:
  SamplingScheme scheme_;
  std::shared_ptr<const SpectralModel> model_;
  double variance_;
  std::vector<double> lags_;  // B(m pi / omega), m = 0..2n
};

// Cached convenience wrapper keyed by (omega, n, model identity).
double exact_mse(double t, const SamplingScheme& scheme,
                 const std::shared_ptr<const SpectralModel>& model);

}  // namespace subsample
