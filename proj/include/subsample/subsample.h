/*
 * subsample: error bounds, sampling design, and Monte Carlo verification for
 * truncated cardinal-series reconstruction of stationary random signals.
 *
 * C API. All functions return ss_status; results travel through out
 * parameters. On failure, ss_last_error() returns a thread-local message
 * describing the violated condition. Handles created by ss_*_create/load
 * must be released with the matching ss_*_free.
 */

#ifndef SUBSAMPLE_H
#define SUBSAMPLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SS_API __declspec(dllexport)
#else
#define SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_ARGUMENT = 1,   /* bad handle, null pointer, malformed input */
  SS_ERR_VALIDITY = 2,   /* precondition or domain violation */
  SS_ERR_INFEASIBLE = 3, /* no schedule stage satisfies the plan */
  SS_ERR_NUMERIC = 4     /* tolerance not reached, factorization failed */
} ss_status;

/* Library version string, e.g. "1.0.0". */
SS_API const char* ss_version(void);

/* Thread-local message for the most recent failing call on this thread. */
SS_API const char* ss_last_error(void);

/* ------------------------------------------------------------------ */
/* Spectral models                                                     */

typedef struct ss_model ss_model;

/* Spectral density 1/(a^2 + lambda^2); covariance (pi/a) exp(-a|tau|). */
SS_API ss_status ss_model_matern_create(double alpha_scale, ss_model** out);

/* Unit-variance bound-only model with tail envelope min(1, 1/lambda). */
SS_API ss_status ss_model_normalized_tail_create(ss_model** out);

/* Tabulated even density plus power-law tail. The arrays hold the density
 * on a strictly increasing nonnegative grid. tail_exponent > 1 declares the
 * decay rate beyond the last knot; pass 0 to omit it, in which case
 * quantities needing mass beyond the grid are refused unless the density
 * ends at zero. */
SS_API ss_status ss_model_tabulated_create(const double* lambdas,
                                           const double* densities,
                                           size_t count, double tail_exponent,
                                           ss_model** out);

/* Same, from a CSV file with header "lambda,density" and a metadata JSON
 * file {"tail_exponent": <real>}. */
SS_API ss_status ss_model_tabulated_load(const char* csv_path,
                                         const char* meta_json_path,
                                         ss_model** out);

SS_API void ss_model_free(ss_model* model);

SS_API ss_status ss_model_covariance(const ss_model* model, double tau,
                                     double* out);
SS_API ss_status ss_model_variance(const ss_model* model, double* out);
SS_API ss_status ss_model_tail_mass(const ss_model* model, double lambda,
                                    double* out);

/* ------------------------------------------------------------------ */
/* Orlicz families                                                     */

typedef struct ss_family ss_family;

/* phi(x) = |x|^alpha / alpha, alpha in (1, 2]; alpha = 2 is Gaussian. */
SS_API ss_status ss_family_power_create(double alpha, ss_family** out);
SS_API void ss_family_free(ss_family* family);

SS_API ss_status ss_phi(const ss_family* family, double x, double* out);
SS_API ss_status ss_phi_density(const ss_family* family, double x, double* out);
SS_API ss_status ss_phi_conjugate(const ss_family* family, double x,
                                  double* out);
/* Numeric conjugate sup_{|y| <= radius} (x y - phi(y)); boundary_warning is
 * set when the maximizer hit the search radius. */
SS_API ss_status ss_phi_conjugate_numeric(const ss_family* family, double x,
                                          double radius, double* out,
                                          int* boundary_warning);

/* ------------------------------------------------------------------ */
/* Error bounds                                                        */

typedef struct ss_scheme {
  double omega;       /* sample spacing is pi / omega */
  long long n;        /* samples at k pi / omega for k = -n..n */
  double lambda_band; /* assumed band edge, 0 < lambda_band < omega */
} ss_scheme;

typedef struct ss_bound_breakdown {
  double z_used;
  double c_value;
  double d_value;
  double tail;
  double total; /* sqrt(c_value)/n + d_value * sqrt(tail) */
  int valid;
} ss_bound_breakdown;

/* int_0^pi sin(x)/x dx. */
SS_API ss_status ss_si_pi(double* out);

SS_API ss_status ss_bound_pointwise(double t, ss_scheme scheme,
                                    const ss_model* model, double z,
                                    ss_bound_breakdown* out);
/* Chooses the smallest admissible z automatically. */
SS_API ss_status ss_bound_pointwise_auto(double t, ss_scheme scheme,
                                         const ss_model* model,
                                         ss_bound_breakdown* out);
/* Uniform bound over [0, T]; z_used reports z* = (omega T / (pi n))^2. */
SS_API ss_status ss_bound_uniform(double T, ss_scheme scheme,
                                  const ss_model* model,
                                  ss_bound_breakdown* out);

/* c_x^p int_0^T (pointwise bound)^p dt with a quadrature error estimate. */
SS_API ss_status ss_lp_bound(ss_scheme scheme, const ss_model* model, double T,
                             double p, double c_x, double* value,
                             double* quad_error);
/* Closed-form envelope c_x^p T (uniform bound)^p. */
SS_API ss_status ss_lp_bound_upper(ss_scheme scheme, const ss_model* model,
                                   double T, double p, double c_x,
                                   double* out);

/* Smallest epsilon for which the reliability bound below applies. */
SS_API ss_status ss_validity_threshold(double s, double p,
                                       const ss_family* family, double* out);
/* P{ integral > epsilon } <= raw; clamped = min(1, raw). Requires epsilon
 * above the validity threshold. */
SS_API ss_status ss_tail_probability(double epsilon, double s, double p,
                                     const ss_family* family, double* raw,
                                     double* clamped);

/* ------------------------------------------------------------------ */
/* Reconstruction                                                      */

SS_API ss_status ss_sinc_kernel(double omega, double t, long long k,
                                double* out);
/* values holds 2n+1 samples, index 0 for k = -n. */
SS_API ss_status ss_reconstruct(double omega, long long n,
                                const double* values, double t, double* out);
/* Exact mean-square reconstruction error at each of count times. */
SS_API ss_status ss_exact_mse_grid(ss_scheme scheme, const ss_model* model,
                                   const double* times, size_t count,
                                   double* out);

/* ------------------------------------------------------------------ */
/* Simulation and Monte Carlo verification                             */

/* Exact Markov recursion for the matern model on a sorted time grid. */
SS_API ss_status ss_simulate_markov(const ss_model* model, const double* times,
                                    size_t count, uint64_t seed,
                                    double* out_values);
/* Cholesky sampler for any model with a covariance (grid cap 5000). */
SS_API ss_status ss_simulate_cholesky(const ss_model* model,
                                      const double* times, size_t count,
                                      uint64_t seed, double* out_values);

/* Monte Carlo sup-RMS reconstruction error over a uniform grid on [0, T].
 * per_t_mse and per_t_stderr are caller buffers of length grid_points (pass
 * NULL to skip). Identical output for every workers value. */
SS_API ss_status ss_mc_sup_rms(ss_scheme scheme, const ss_model* model,
                               double T, int num_realizations,
                               uint64_t master_seed, int grid_points,
                               int workers, double* sup_estimate,
                               double* sup_stderr, double* per_t_mse,
                               double* per_t_stderr);

/* Empirical exceedance of int_0^T |X - X_n|^p dt over epsilon versus the
 * theoretical bound. has_bound is 0 when epsilon is at or below the validity
 * threshold (no applicable bound); bound_raw/bound are then set to -1. */
SS_API ss_status ss_mc_lp_exceedance(ss_scheme scheme, const ss_model* model,
                                     const ss_family* family, double T,
                                     double p, double epsilon,
                                     int num_realizations, uint64_t master_seed,
                                     int grid_points, int workers,
                                     double* frequency, double* s_value,
                                     int* has_bound, double* bound_raw,
                                     double* bound, int* margin_ok,
                                     int* grid_warning);

/* One realization and its reconstruction on a uniform grid over [0, T];
 * x and x_n are caller buffers of length grid_points. */
SS_API ss_status ss_simulate_reconstruction(ss_scheme scheme,
                                            const ss_model* model, double T,
                                            uint64_t master_seed,
                                            int realization_index,
                                            int grid_points, double* x,
                                            double* x_n);

/* ------------------------------------------------------------------ */
/* Planner                                                             */

typedef struct ss_plan_result {
  int feasible;
  int N;
  double omega;
  long long n;
  double lambda_band;
  double a_tilde_value;
  double rhs_value;
  double s_upper;
  int gaussian_reliability_ok;
  int threshold_ok;
  /* Minimality certificate for stage N-1; has_prev is 0 when the previous
   * stage has no admissible z* or N is the first stage. */
  int has_prev;
  double prev_a_tilde;
  int prev_satisfies;
} ss_plan_result;

/* (epsilon / T)^{1/p} / sqrt(max(p, 2 ln(2/delta))). */
SS_API ss_status ss_required_rhs(double epsilon, double delta, double p,
                                 double T, double* out);

/* Smallest schedule stage meeting the accuracy and reliability criteria.
 * use_quadrature_s certifies via the quadrature integral instead of the
 * closed-form envelope; force_general_route applies the two-inequality
 * reliability route even for the Gaussian family. Returns
 * SS_ERR_INFEASIBLE (with the trajectory in ss_last_error()) when no stage
 * within max_stage qualifies. */
SS_API ss_status ss_plan(double epsilon, double delta, double p, double T,
                         const ss_model* model, const ss_family* family,
                         double c_x, double band_ratio, int max_stage,
                         int use_quadrature_s, int force_general_route,
                         ss_plan_result* out);

/* Plan over the grid product; out must hold n_epsilons * n_deltas * n_ps
 * cells ordered epsilon-major, then delta, then p. Infeasible cells have
 * feasible = 0 and rhs_value set. match_alpha_to_p gives each cell the
 * power family with alpha equal to its p. */
SS_API ss_status ss_plan_sweep(const double* epsilons, size_t n_epsilons,
                               const double* deltas, size_t n_deltas,
                               const double* ps, size_t n_ps,
                               const ss_model* model, const ss_family* family,
                               double T, double c_x, double band_ratio,
                               int max_stage, int use_quadrature_s,
                               int force_general_route, int match_alpha_to_p,
                               ss_plan_result* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SUBSAMPLE_H */
