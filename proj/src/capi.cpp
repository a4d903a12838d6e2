#include "subsample/subsample.h"

#include <exception>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "errors.hpp"
#include "orlicz.hpp"
#include "planner.hpp"
#include "simulate.hpp"
#include "spectral.hpp"
#include "wks.hpp"

struct ss_model {
  std::shared_ptr<const subsample::SpectralModel> ptr;
};

struct ss_family {
  std::shared_ptr<const subsample::NFunction> ptr;
};

namespace {

thread_local std::string g_last_error;

ss_status fail(ss_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
ss_status guarded(Fn&& fn) {
  try {
    fn();
    return SS_OK;
  } catch (const subsample::ValidityError& e) {
    return fail(SS_ERR_VALIDITY, e.what());
  } catch (const subsample::InfeasiblePlanError& e) {
    return fail(SS_ERR_INFEASIBLE, e.what());
  } catch (const subsample::NumericError& e) {
    return fail(SS_ERR_NUMERIC, e.what());
  } catch (const std::domain_error& e) {
    return fail(SS_ERR_VALIDITY, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SS_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SS_ERR_NUMERIC, e.what());
  } catch (...) {
    return fail(SS_ERR_NUMERIC, "unknown failure");
  }
}

subsample::SamplingScheme to_scheme(ss_scheme s) {
  subsample::SamplingScheme scheme;
  scheme.omega = s.omega;
  scheme.n = s.n;
  scheme.lambda_band = s.lambda_band;
  return scheme;
}

void to_breakdown(const subsample::BoundBreakdown& b, ss_bound_breakdown* out) {
  out->z_used = b.z_used;
  out->c_value = b.c_value;
  out->d_value = b.d_value;
  out->tail = b.tail;
  out->total = b.total;
  out->valid = b.valid ? 1 : 0;
}

void to_plan_result(const subsample::PlanResult& r, ss_plan_result* out) {
  out->feasible = 1;
  out->N = r.N;
  out->omega = r.omega;
  out->n = r.n;
  out->lambda_band = r.lambda_band;
  out->a_tilde_value = r.a_tilde_value;
  out->rhs_value = r.rhs_value;
  out->s_upper = r.s_upper;
  out->gaussian_reliability_ok = r.gaussian_reliability_ok ? 1 : 0;
  out->threshold_ok = r.threshold_ok ? 1 : 0;
  out->has_prev = r.prev_a_tilde.has_value() ? 1 : 0;
  out->prev_a_tilde = r.prev_a_tilde.value_or(0.0);
  out->prev_satisfies = r.prev_satisfies ? 1 : 0;
}

subsample::PlanRequest make_request(double epsilon, double delta, double p,
                                    double T, const ss_model* model,
                                    const ss_family* family, double c_x,
                                    double band_ratio, int max_stage,
                                    int use_quadrature_s,
                                    int force_general_route) {
  subsample::PlanRequest request;
  request.epsilon = epsilon;
  request.delta = delta;
  request.p = p;
  request.T = T;
  request.model = model->ptr;
  if (family != nullptr) request.family = family->ptr;
  request.c_x = c_x;
  request.schedule.band_ratio = band_ratio;
  request.schedule.max_stage = max_stage;
  request.use_quadrature_s = use_quadrature_s != 0;
  request.force_general_route = force_general_route != 0;
  return request;
}

constexpr const char* kVersion = "1.0.0";

}  // namespace

extern "C" {

const char* ss_version(void) { return kVersion; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ */

ss_status ss_model_matern_create(double alpha_scale, ss_model** out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto model = std::make_shared<const subsample::MaternHalfModel>(alpha_scale);
    *out = new ss_model{model};
  });
}

ss_status ss_model_normalized_tail_create(ss_model** out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto model = std::make_shared<const subsample::NormalizedTailModel>();
    *out = new ss_model{model};
  });
}

ss_status ss_model_tabulated_create(const double* lambdas,
                                    const double* densities, size_t count,
                                    double tail_exponent, ss_model** out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  *out = nullptr;
  if (lambdas == nullptr || densities == nullptr)
    return fail(SS_ERR_ARGUMENT, "lambdas/densities is null");
  return guarded([&] {
    std::optional<double> exponent;
    if (tail_exponent != 0.0) exponent = tail_exponent;
    auto model = std::make_shared<const subsample::TabulatedDensityModel>(
        std::vector<double>(lambdas, lambdas + count),
        std::vector<double>(densities, densities + count), exponent);
    *out = new ss_model{model};
  });
}

ss_status ss_model_tabulated_load(const char* csv_path,
                                  const char* meta_json_path, ss_model** out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  *out = nullptr;
  if (csv_path == nullptr || meta_json_path == nullptr)
    return fail(SS_ERR_ARGUMENT, "path is null");
  return guarded([&] {
    auto model = subsample::load_tabulated_density(csv_path, meta_json_path);
    *out = new ss_model{model};
  });
}

void ss_model_free(ss_model* model) { delete model; }

ss_status ss_model_covariance(const ss_model* model, double tau, double* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] { *out = model->ptr->covariance(tau); });
}

ss_status ss_model_variance(const ss_model* model, double* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] { *out = model->ptr->variance(); });
}

ss_status ss_model_tail_mass(const ss_model* model, double lambda,
                             double* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] { *out = model->ptr->tail_mass(lambda); });
}

/* ------------------------------------------------------------------ */

ss_status ss_family_power_create(double alpha, ss_family** out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto family = std::make_shared<const subsample::PowerFamily>(alpha);
    *out = new ss_family{family};
  });
}

void ss_family_free(ss_family* family) { delete family; }

ss_status ss_phi(const ss_family* family, double x, double* out) {
  if (family == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/out is null");
  return guarded([&] { *out = family->ptr->phi(x); });
}

ss_status ss_phi_density(const ss_family* family, double x, double* out) {
  if (family == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/out is null");
  return guarded([&] { *out = family->ptr->density(x); });
}

ss_status ss_phi_conjugate(const ss_family* family, double x, double* out) {
  if (family == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/out is null");
  return guarded([&] { *out = family->ptr->conjugate(x); });
}

ss_status ss_phi_conjugate_numeric(const ss_family* family, double x,
                                   double radius, double* out,
                                   int* boundary_warning) {
  if (family == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/out is null");
  return guarded([&] {
    auto result = subsample::conjugate_numeric(*family->ptr, x, radius);
    *out = result.value;
    if (boundary_warning != nullptr)
      *boundary_warning = result.boundary ? 1 : 0;
  });
}

/* ------------------------------------------------------------------ */

ss_status ss_si_pi(double* out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  return guarded([&] { *out = subsample::sine_integral_pi(); });
}

ss_status ss_bound_pointwise(double t, ss_scheme scheme, const ss_model* model,
                             double z, ss_bound_breakdown* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] {
    auto breakdown =
        subsample::pointwise_bound(t, to_scheme(scheme), *model->ptr, z);
    to_breakdown(breakdown, out);
  });
}

ss_status ss_bound_pointwise_auto(double t, ss_scheme scheme,
                                  const ss_model* model,
                                  ss_bound_breakdown* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] {
    auto breakdown =
        subsample::pointwise_bound_auto(t, to_scheme(scheme), *model->ptr);
    to_breakdown(breakdown, out);
  });
}

ss_status ss_bound_uniform(double T, ss_scheme scheme, const ss_model* model,
                           ss_bound_breakdown* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] {
    auto breakdown =
        subsample::uniform_bound(T, to_scheme(scheme), *model->ptr);
    to_breakdown(breakdown, out);
  });
}

ss_status ss_lp_bound(ss_scheme scheme, const ss_model* model, double T,
                      double p, double c_x, double* value,
                      double* quad_error) {
  if (model == nullptr || value == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/value is null");
  return guarded([&] {
    auto result =
        subsample::lp_bound(to_scheme(scheme), *model->ptr, T, p, c_x);
    *value = result.value;
    if (quad_error != nullptr) *quad_error = result.quad_error;
  });
}

ss_status ss_lp_bound_upper(ss_scheme scheme, const ss_model* model, double T,
                            double p, double c_x, double* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  return guarded([&] {
    *out = subsample::lp_bound_upper(to_scheme(scheme), *model->ptr, T, p, c_x);
  });
}

ss_status ss_validity_threshold(double s, double p, const ss_family* family,
                                double* out) {
  if (family == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/out is null");
  return guarded(
      [&] { *out = subsample::validity_threshold(s, p, *family->ptr); });
}

ss_status ss_tail_probability(double epsilon, double s, double p,
                              const ss_family* family, double* raw,
                              double* clamped) {
  if (family == nullptr || raw == nullptr)
    return fail(SS_ERR_ARGUMENT, "family/raw is null");
  return guarded([&] {
    auto result = subsample::tail_probability(epsilon, s, p, *family->ptr);
    *raw = result.raw;
    if (clamped != nullptr) *clamped = result.clamped;
  });
}

/* ------------------------------------------------------------------ */

ss_status ss_sinc_kernel(double omega, double t, long long k, double* out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  return guarded([&] { *out = subsample::sinc_kernel(omega, t, k); });
}

ss_status ss_reconstruct(double omega, long long n, const double* values,
                         double t, double* out) {
  if (values == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "values/out is null");
  if (n < 0) return fail(SS_ERR_ARGUMENT, "n must be >= 0");
  return guarded([&] {
    subsample::SampleSet samples;
    samples.omega = omega;
    samples.n = n;
    samples.values.assign(values, values + (2 * n + 1));
    *out = subsample::reconstruct(samples, t);
  });
}

ss_status ss_exact_mse_grid(ss_scheme scheme, const ss_model* model,
                            const double* times, size_t count, double* out) {
  if (model == nullptr || times == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/times/out is null");
  return guarded([&] {
    subsample::ExactMseEvaluator evaluator(to_scheme(scheme), model->ptr);
    for (size_t i = 0; i < count; ++i) out[i] = evaluator(times[i]);
  });
}

/* ------------------------------------------------------------------ */

ss_status ss_simulate_markov(const ss_model* model, const double* times,
                             size_t count, uint64_t seed, double* out_values) {
  if (model == nullptr || times == nullptr || out_values == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/times/out_values is null");
  return guarded([&] {
    auto matern =
        dynamic_cast<const subsample::MaternHalfModel*>(model->ptr.get());
    if (matern == nullptr)
      throw std::invalid_argument(
          "markov sampler requires the matern model (exponential covariance)");
    auto realization = subsample::simulate_markov(
        *matern, std::vector<double>(times, times + count), seed);
    std::copy(realization.values.begin(), realization.values.end(),
              out_values);
  });
}

ss_status ss_simulate_cholesky(const ss_model* model, const double* times,
                               size_t count, uint64_t seed,
                               double* out_values) {
  if (model == nullptr || times == nullptr || out_values == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/times/out_values is null");
  return guarded([&] {
    auto realization = subsample::simulate_cholesky(
        *model->ptr, std::vector<double>(times, times + count), seed);
    std::copy(realization.values.begin(), realization.values.end(),
              out_values);
  });
}

ss_status ss_mc_sup_rms(ss_scheme scheme, const ss_model* model, double T,
                        int num_realizations, uint64_t master_seed,
                        int grid_points, int workers, double* sup_estimate,
                        double* sup_stderr, double* per_t_mse,
                        double* per_t_stderr) {
  if (model == nullptr || sup_estimate == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/sup_estimate is null");
  return guarded([&] {
    subsample::McConfig config;
    config.num_realizations = num_realizations;
    config.master_seed = master_seed;
    config.eval_grid_points = grid_points;
    config.workers = workers;
    auto result =
        subsample::empirical_sup_rms(to_scheme(scheme), model->ptr, T, config);
    *sup_estimate = result.estimate;
    if (sup_stderr != nullptr) *sup_stderr = result.stderr_jackknife;
    if (per_t_mse != nullptr)
      std::copy(result.per_t_mse.begin(), result.per_t_mse.end(), per_t_mse);
    if (per_t_stderr != nullptr)
      std::copy(result.per_t_stderr.begin(), result.per_t_stderr.end(),
                per_t_stderr);
  });
}

ss_status ss_mc_lp_exceedance(ss_scheme scheme, const ss_model* model,
                              const ss_family* family, double T, double p,
                              double epsilon, int num_realizations,
                              uint64_t master_seed, int grid_points,
                              int workers, double* frequency, double* s_value,
                              int* has_bound, double* bound_raw, double* bound,
                              int* margin_ok, int* grid_warning) {
  if (model == nullptr || family == nullptr || frequency == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/family/frequency is null");
  return guarded([&] {
    subsample::McConfig config;
    config.num_realizations = num_realizations;
    config.master_seed = master_seed;
    config.eval_grid_points = grid_points;
    config.workers = workers;
    auto result = subsample::empirical_lp_exceedance(
        to_scheme(scheme), model->ptr, T, p, epsilon, config, *family->ptr);
    *frequency = result.frequency;
    if (s_value != nullptr) *s_value = result.s_value;
    if (has_bound != nullptr) *has_bound = result.bound.has_value() ? 1 : 0;
    if (bound_raw != nullptr) *bound_raw = result.bound_raw.value_or(-1.0);
    if (bound != nullptr) *bound = result.bound.value_or(-1.0);
    if (margin_ok != nullptr) *margin_ok = result.margin_ok ? 1 : 0;
    if (grid_warning != nullptr) *grid_warning = result.grid_warning ? 1 : 0;
  });
}

ss_status ss_simulate_reconstruction(ss_scheme scheme, const ss_model* model,
                                     double T, uint64_t master_seed,
                                     int realization_index, int grid_points,
                                     double* x, double* x_n) {
  if (model == nullptr || x == nullptr || x_n == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/x/x_n is null");
  return guarded([&] {
    auto record = subsample::simulate_reconstruction(
        to_scheme(scheme), model->ptr, T, master_seed, realization_index,
        grid_points);
    std::copy(record.x.begin(), record.x.end(), x);
    std::copy(record.x_n.begin(), record.x_n.end(), x_n);
  });
}

/* ------------------------------------------------------------------ */

ss_status ss_required_rhs(double epsilon, double delta, double p, double T,
                          double* out) {
  if (out == nullptr) return fail(SS_ERR_ARGUMENT, "out is null");
  return guarded([&] {
    *out = subsample::required_uniform_bound(epsilon, delta, p, T);
  });
}

ss_status ss_plan(double epsilon, double delta, double p, double T,
                  const ss_model* model, const ss_family* family, double c_x,
                  double band_ratio, int max_stage, int use_quadrature_s,
                  int force_general_route, ss_plan_result* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  *out = ss_plan_result{};
  return guarded([&] {
    out->rhs_value = subsample::required_uniform_bound(epsilon, delta, p, T);
    auto request = make_request(epsilon, delta, p, T, model, family, c_x,
                                band_ratio, max_stage, use_quadrature_s,
                                force_general_route);
    auto result = subsample::plan(request);
    to_plan_result(result, out);
  });
}

ss_status ss_plan_sweep(const double* epsilons, size_t n_epsilons,
                        const double* deltas, size_t n_deltas,
                        const double* ps, size_t n_ps, const ss_model* model,
                        const ss_family* family, double T, double c_x,
                        double band_ratio, int max_stage, int use_quadrature_s,
                        int force_general_route, int match_alpha_to_p,
                        ss_plan_result* out) {
  if (model == nullptr || out == nullptr)
    return fail(SS_ERR_ARGUMENT, "model/out is null");
  if (epsilons == nullptr || deltas == nullptr || ps == nullptr)
    return fail(SS_ERR_ARGUMENT, "grid array is null");
  if (n_epsilons == 0 || n_deltas == 0 || n_ps == 0)
    return fail(SS_ERR_ARGUMENT, "grid arrays must be nonempty");
  return guarded([&] {
    auto base = make_request(epsilons[0], deltas[0], ps[0], T, model, family,
                             c_x, band_ratio, max_stage, use_quadrature_s,
                             force_general_route);
    auto cells = subsample::plan_sweep(
        base, std::vector<double>(epsilons, epsilons + n_epsilons),
        std::vector<double>(deltas, deltas + n_deltas),
        std::vector<double>(ps, ps + n_ps), match_alpha_to_p != 0);
    for (size_t i = 0; i < cells.size(); ++i) {
      out[i] = ss_plan_result{};
      out[i].rhs_value = cells[i].rhs_value;
      if (cells[i].result.has_value()) to_plan_result(*cells[i].result, &out[i]);
    }
  });
}

} /* extern "C" */
