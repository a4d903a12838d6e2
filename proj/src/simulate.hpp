#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "bounds.hpp"
#include "orlicz.hpp"
#include "spectral.hpp"

namespace subsample {

enum class SimulationMethod { markov, cholesky };

struct Realization {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  SimulationMethod method = SimulationMethod::markov;
};

struct McConfig {
  int num_realizations = 50;
  std::uint64_t master_seed = 0;
  int eval_grid_points = 201;
  // Worker threads; 0 picks the hardware concurrency. Results are identical
  // for every worker count: realization r always uses substream(master, r).
  int workers = 0;
};

// Exact sampler for the exponential-covariance model on an arbitrary sorted
// grid, using its Markov property: X(t0) ~ N(0, B(0)) and
//   X(t_{i+1}) = rho_i X(t_i) + sqrt(B(0) (1 - rho_i^2)) xi_i,
// rho_i = exp(-a (t_{i+1} - t_i)).
Realization simulate_markov(const MaternHalfModel& model,
                            std::vector<double> times, std::uint64_t seed);

// Exact sampler for any model with a covariance, by Cholesky factorization
// of the covariance matrix (diagonal jitter up to 1e-10 on failure).
Realization simulate_cholesky(const SpectralModel& model,
                              std::vector<double> times, std::uint64_t seed,
                              std::size_t grid_cap = 5000);

struct McSupRms {
  double estimate = 0.0;         // sup over the grid of the per-t RMS error
  double stderr_jackknife = 0.0; // leave-one-out standard error of estimate
  std::vector<double> grid;
  std::vector<double> per_t_mse;
  std::vector<double> per_t_stderr;  // standard error of each per-t MSE
};

// Monte Carlo estimate of sup_t sqrt(E|X(t) - X_n(t)|^2) over [0, T].
// Every realization is simulated jointly on the union of the sample grid
// and the evaluation grid, then reconstructed from its own samples.
McSupRms empirical_sup_rms(const SamplingScheme& scheme,
                           const std::shared_ptr<const SpectralModel>& model,
                           double T, const McConfig& config);
McSupRms empirical_sup_rms(const SamplingScheme& scheme,
                           const std::shared_ptr<const SpectralModel>& model,
                           const std::vector<double>& eval_grid,
                           const McConfig& config);

struct LpExceedance {
  double frequency = 0.0;  // fraction of realizations with integral > epsilon
  double s_value = 0.0;    // S used by the theoretical bound (lp_bound)
  // Absent when epsilon is at or below the validity threshold, in which case
  // the theoretical bound does not apply.
  std::optional<double> bound_raw;
  std::optional<double> bound;
  bool margin_ok = false;   // frequency <= bound + 3 binomial standard errors
  bool grid_warning = false;  // doubling the grid moved some integral > 1%
};

// Empirical exceedance frequency of int_0^T |X - X_n|^p dt over epsilon,
// against the theoretical reliability bound.
LpExceedance empirical_lp_exceedance(
    const SamplingScheme& scheme,
    const std::shared_ptr<const SpectralModel>& model, double T, double p,
    double epsilon, const McConfig& config, const NFunction& family,
    double c_x = 1.0);

struct PathRecord {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> x_n;
  std::uint64_t seed = 0;
};

// One realization together with its truncated-series reconstruction on a
// uniform grid over [0, T]; used for figure-style output.
PathRecord simulate_reconstruction(
    const SamplingScheme& scheme,
    const std::shared_ptr<const SpectralModel>& model, double T,
    std::uint64_t master_seed, int realization_index, int grid_points);

}  // namespace subsample
