#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "orlicz.hpp"
#include "planner.hpp"
#include "simulate.hpp"
#include "spectral.hpp"
#include "subsample/subsample.h"
#include "wks.hpp"

using namespace subsample;

namespace {

struct ModelGuard {
  ss_model* handle = nullptr;
  ~ModelGuard() { ss_model_free(handle); }
};

struct FamilyGuard {
  ss_family* handle = nullptr;
  ~FamilyGuard() { ss_family_free(handle); }
};

ss_scheme c_scheme(double omega, long long n, double lambda) {
  return ss_scheme{omega, n, lambda};
}

SamplingScheme cxx_scheme(double omega, long long n, double lambda) {
  SamplingScheme s;
  s.omega = omega;
  s.n = n;
  s.lambda_band = lambda;
  return s;
}

}  // namespace

TEST_CASE("version and error channel") {
  CHECK(std::string(ss_version()) == "1.0.0");
  ss_model* handle = nullptr;
  CHECK(ss_model_matern_create(-1.0, &handle) == SS_ERR_VALIDITY);
  CHECK(handle == nullptr);
  CHECK(std::strlen(ss_last_error()) > 0);
  CHECK(ss_model_matern_create(1.0, nullptr) == SS_ERR_ARGUMENT);
}

TEST_CASE("model handles mirror the native models") {
  ModelGuard matern;
  REQUIRE(ss_model_matern_create(1.0, &matern.handle) == SS_OK);
  MaternHalfModel native(1.0);
  double value = 0.0;
  CHECK(ss_model_covariance(matern.handle, 0.7, &value) == SS_OK);
  CHECK(value == native.covariance(0.7));
  CHECK(ss_model_variance(matern.handle, &value) == SS_OK);
  CHECK(value == native.variance());
  CHECK(ss_model_tail_mass(matern.handle, 2.0, &value) == SS_OK);
  CHECK(value == native.tail_mass(2.0));
  CHECK(ss_model_tail_mass(matern.handle, -1.0, &value) == SS_ERR_VALIDITY);

  ModelGuard tail_only;
  REQUIRE(ss_model_normalized_tail_create(&tail_only.handle) == SS_OK);
  CHECK(ss_model_variance(tail_only.handle, &value) == SS_OK);
  CHECK(value == 1.0);
  CHECK(ss_model_covariance(tail_only.handle, 0.1, &value) == SS_ERR_VALIDITY);

  ss_model_free(nullptr);  // must be a no-op
}

TEST_CASE("tabulated handles match arrays and files") {
  const double lambdas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double densities[] = {1.0, 0.75, 0.5, 0.25, 0.0};
  ModelGuard from_arrays;
  REQUIRE(ss_model_tabulated_create(lambdas, densities, 5, 0.0,
                                    &from_arrays.handle) == SS_OK);
  TabulatedDensityModel native({0.0, 0.25, 0.5, 0.75, 1.0},
                               {1.0, 0.75, 0.5, 0.25, 0.0}, std::nullopt);
  double value = 0.0;
  CHECK(ss_model_variance(from_arrays.handle, &value) == SS_OK);
  CHECK(value == native.variance());
  CHECK(ss_model_covariance(from_arrays.handle, 1.7, &value) == SS_OK);
  CHECK(value == native.covariance(1.7));
  CHECK(ss_model_tail_mass(from_arrays.handle, 0.4, &value) == SS_OK);
  CHECK(value == native.tail_mass(0.4));

  const std::string csv = "/tmp/subsample_capi_density.csv";
  const std::string meta = "/tmp/subsample_capi_density.json";
  {
    std::ofstream os(csv);
    os << "lambda,density\n0,1\n0.25,0.75\n0.5,0.5\n0.75,0.25\n1,0\n";
    std::ofstream ms(meta);
    ms << "{\"tail_exponent\": 2.0}\n";
  }
  ModelGuard from_files;
  REQUIRE(ss_model_tabulated_load(csv.c_str(), meta.c_str(),
                                  &from_files.handle) == SS_OK);
  ModelGuard same_exponent;
  REQUIRE(ss_model_tabulated_create(lambdas, densities, 5, 2.0,
                                    &same_exponent.handle) == SS_OK);
  double a = 0.0, b = 0.0;
  CHECK(ss_model_covariance(from_files.handle, 1.7, &a) == SS_OK);
  CHECK(ss_model_covariance(same_exponent.handle, 1.7, &b) == SS_OK);
  CHECK(a == b);
  CHECK(ss_model_tabulated_load("/nonexistent/x.csv", meta.c_str(),
                                &from_files.handle) == SS_ERR_VALIDITY);

  // tail_exponent <= 1 is rejected, 0 means "none declared".
  ss_model* bad = nullptr;
  CHECK(ss_model_tabulated_create(lambdas, densities, 5, 0.5, &bad) ==
        SS_ERR_VALIDITY);
}

TEST_CASE("family handles mirror the power family") {
  FamilyGuard family;
  REQUIRE(ss_family_power_create(1.5, &family.handle) == SS_OK);
  PowerFamily native(1.5);
  double value = 0.0;
  CHECK(ss_phi(family.handle, 1.7, &value) == SS_OK);
  CHECK(value == native.phi(1.7));
  CHECK(ss_phi_density(family.handle, 1.7, &value) == SS_OK);
  CHECK(value == native.density(1.7));
  CHECK(ss_phi_conjugate(family.handle, 1.7, &value) == SS_OK);
  CHECK(value == native.conjugate(1.7));
  CHECK(ss_phi_density(family.handle, -0.1, &value) == SS_ERR_VALIDITY);

  int boundary = 0;
  CHECK(ss_phi_conjugate_numeric(family.handle, 2.0, 50.0, &value,
                                 &boundary) == SS_OK);
  const auto native_numeric = conjugate_numeric(native, 2.0, 50.0);
  CHECK(value == native_numeric.value);
  CHECK(boundary == 0);
  CHECK(ss_phi_conjugate_numeric(family.handle, 100.0, 2.0, &value,
                                 &boundary) == SS_OK);
  CHECK(boundary == 1);

  ss_family* bad = nullptr;
  CHECK(ss_family_power_create(2.5, &bad) == SS_ERR_VALIDITY);
  ss_family_free(nullptr);
}

TEST_CASE("bound calls mirror the native bounds") {
  ModelGuard model;
  REQUIRE(ss_model_matern_create(1.0, &model.handle) == SS_OK);
  MaternHalfModel native(1.0);
  const auto scheme = cxx_scheme(16.0, 256, 12.0);
  const auto cs = c_scheme(16.0, 256, 12.0);

  double si = 0.0;
  CHECK(ss_si_pi(&si) == SS_OK);
  CHECK(si == sine_integral_pi());

  ss_bound_breakdown out{};
  CHECK(ss_bound_pointwise(0.5, cs, model.handle, 0.25, &out) == SS_OK);
  const auto native_point = pointwise_bound(0.5, scheme, native, 0.25);
  CHECK(out.z_used == native_point.z_used);
  CHECK(out.c_value == native_point.c_value);
  CHECK(out.d_value == native_point.d_value);
  CHECK(out.tail == native_point.tail);
  CHECK(out.total == native_point.total);
  CHECK(out.valid == 1);

  CHECK(ss_bound_pointwise_auto(0.5, cs, model.handle, &out) == SS_OK);
  CHECK(out.total == pointwise_bound_auto(0.5, scheme, native).total);

  CHECK(ss_bound_uniform(1.0, cs, model.handle, &out) == SS_OK);
  const auto native_uniform = uniform_bound(1.0, scheme, native);
  CHECK(out.z_used == native_uniform.z_used);
  CHECK(out.total == native_uniform.total);

  // z* >= 1 surfaces as a validity failure naming z*.
  CHECK(ss_bound_uniform(1.0, c_scheme(8.0, 2, 6.0), model.handle, &out) ==
        SS_ERR_VALIDITY);
  CHECK(std::strstr(ss_last_error(), "z*") != nullptr);

  double value = 0.0, err = 0.0;
  CHECK(ss_lp_bound(cs, model.handle, 1.0, 2.0, 1.0, &value, &err) == SS_OK);
  const auto native_lp = lp_bound(scheme, native, 1.0, 2.0, 1.0);
  CHECK(value == native_lp.value);
  CHECK(err == native_lp.quad_error);
  CHECK(ss_lp_bound_upper(cs, model.handle, 1.0, 2.0, 1.0, &value) == SS_OK);
  CHECK(value == lp_bound_upper(scheme, native, 1.0, 2.0, 1.0));
}

TEST_CASE("reliability calls mirror the native ones") {
  FamilyGuard family;
  REQUIRE(ss_family_power_create(2.0, &family.handle) == SS_OK);
  PowerFamily native(2.0);
  double value = 0.0;
  CHECK(ss_validity_threshold(1.0, 2.0, family.handle, &value) == SS_OK);
  CHECK(value == validity_threshold(1.0, 2.0, native));

  double raw = 0.0, clamped = 0.0;
  CHECK(ss_tail_probability(4.0, 1.0, 2.0, family.handle, &raw, &clamped) ==
        SS_OK);
  const auto native_tail = tail_probability(4.0, 1.0, 2.0, native);
  CHECK(raw == native_tail.raw);
  CHECK(clamped == native_tail.clamped);
  CHECK(ss_tail_probability(1.0, 1.0, 2.0, family.handle, &raw, &clamped) ==
        SS_ERR_VALIDITY);
}

TEST_CASE("reconstruction calls mirror the native ones") {
  double value = 0.0;
  CHECK(ss_sinc_kernel(4.0, 0.37, 2, &value) == SS_OK);
  CHECK(value == sinc_kernel(4.0, 0.37, 2));
  CHECK(ss_sinc_kernel(0.0, 0.37, 2, &value) == SS_ERR_VALIDITY);

  SampleSet samples;
  samples.omega = 4.0;
  samples.n = 8;
  for (long long k = -8; k <= 8; ++k) {
    samples.values.push_back(std::sin(0.3 * static_cast<double>(k)));
  }
  CHECK(ss_reconstruct(4.0, 8, samples.values.data(), 0.61, &value) == SS_OK);
  CHECK(value == reconstruct(samples, 0.61));
  CHECK(ss_reconstruct(4.0, 8, nullptr, 0.61, &value) == SS_ERR_ARGUMENT);

  ModelGuard model;
  REQUIRE(ss_model_matern_create(1.0, &model.handle) == SS_OK);
  auto shared = std::make_shared<MaternHalfModel>(1.0);
  const auto scheme = cxx_scheme(8.0, 72, 6.0);
  const double times[] = {0.0, 0.37, 0.7};
  double mse[3] = {0.0, 0.0, 0.0};
  CHECK(ss_exact_mse_grid(c_scheme(8.0, 72, 6.0), model.handle, times, 3,
                          mse) == SS_OK);
  ExactMseEvaluator evaluator(scheme, shared);
  for (int i = 0; i < 3; ++i) CHECK(mse[i] == evaluator(times[i]));
}

TEST_CASE("simulation calls mirror the native ones") {
  ModelGuard model;
  REQUIRE(ss_model_matern_create(1.0, &model.handle) == SS_OK);
  MaternHalfModel native(1.0);
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
  std::vector<double> values(times.size());
  CHECK(ss_simulate_markov(model.handle, times.data(), times.size(), 42,
                           values.data()) == SS_OK);
  const auto native_markov = simulate_markov(native, times, 42);
  CHECK(values == native_markov.values);

  CHECK(ss_simulate_cholesky(model.handle, times.data(), times.size(), 42,
                             values.data()) == SS_OK);
  const auto native_chol = simulate_cholesky(native, times, 42);
  CHECK(values == native_chol.values);

  ModelGuard tail_only;
  REQUIRE(ss_model_normalized_tail_create(&tail_only.handle) == SS_OK);
  CHECK(ss_simulate_markov(tail_only.handle, times.data(), times.size(), 42,
                           values.data()) == SS_ERR_ARGUMENT);
  CHECK(std::strstr(ss_last_error(), "matern") != nullptr);
}

TEST_CASE("monte carlo calls mirror the native ones") {
  ModelGuard model;
  REQUIRE(ss_model_matern_create(1.0, &model.handle) == SS_OK);
  auto shared = std::make_shared<MaternHalfModel>(1.0);
  const auto scheme = cxx_scheme(8.0, 72, 6.0);

  McConfig config;
  config.num_realizations = 12;
  config.master_seed = 9;
  config.eval_grid_points = 21;
  config.workers = 2;
  const auto native = empirical_sup_rms(scheme, shared, 1.0, config);

  double estimate = 0.0, se = 0.0;
  std::vector<double> per_t(21), per_t_se(21);
  CHECK(ss_mc_sup_rms(c_scheme(8.0, 72, 6.0), model.handle, 1.0, 12, 9, 21, 2,
                      &estimate, &se, per_t.data(), per_t_se.data()) == SS_OK);
  CHECK(estimate == native.estimate);
  CHECK(se == native.stderr_jackknife);
  CHECK(per_t == native.per_t_mse);
  CHECK(per_t_se == native.per_t_stderr);
  // Optional buffers may be omitted.
  CHECK(ss_mc_sup_rms(c_scheme(8.0, 72, 6.0), model.handle, 1.0, 12, 9, 21, 2,
                      &estimate, nullptr, nullptr, nullptr) == SS_OK);
  CHECK(estimate == native.estimate);

  FamilyGuard family;
  REQUIRE(ss_family_power_create(2.0, &family.handle) == SS_OK);
  PowerFamily native_family(2.0);
  const auto native_exc = empirical_lp_exceedance(scheme, shared, 1.0, 2.0,
                                                  10.0, config, native_family);
  double frequency = 0.0, s_value = 0.0, raw = 0.0, clamped = 0.0;
  int has_bound = 0, margin_ok = 0, grid_warning = 0;
  CHECK(ss_mc_lp_exceedance(c_scheme(8.0, 72, 6.0), model.handle,
                            family.handle, 1.0, 2.0, 10.0, 12, 9, 21, 2,
                            &frequency, &s_value, &has_bound, &raw, &clamped,
                            &margin_ok, &grid_warning) == SS_OK);
  CHECK(frequency == native_exc.frequency);
  CHECK(s_value == native_exc.s_value);
  REQUIRE(has_bound == (native_exc.bound_raw.has_value() ? 1 : 0));
  if (has_bound) {
    CHECK(raw == native_exc.bound_raw.value());
    CHECK(clamped == native_exc.bound.value());
  }
  CHECK(margin_ok == (native_exc.margin_ok ? 1 : 0));
  CHECK(grid_warning == (native_exc.grid_warning ? 1 : 0));

  const auto native_path = simulate_reconstruction(scheme, shared, 1.0, 17, 2,
                                                   51);
  std::vector<double> x(51), x_n(51);
  CHECK(ss_simulate_reconstruction(c_scheme(8.0, 72, 6.0), model.handle, 1.0,
                                   17, 2, 51, x.data(), x_n.data()) == SS_OK);
  CHECK(x == native_path.x);
  CHECK(x_n == native_path.x_n);
}

TEST_CASE("plan calls mirror the native planner") {
  ModelGuard model;
  REQUIRE(ss_model_normalized_tail_create(&model.handle) == SS_OK);
  auto shared = std::make_shared<NormalizedTailModel>();

  PlanRequest req;
  req.epsilon = 0.1;
  req.delta = 0.1;
  req.p = 2.0;
  req.T = 1.0;
  req.model = shared;
  const auto native = plan(req);

  ss_plan_result out{};
  CHECK(ss_plan(0.1, 0.1, 2.0, 1.0, model.handle, nullptr, 1.0, 0.75, 40, 0,
                0, &out) == SS_OK);
  CHECK(out.feasible == 1);
  CHECK(out.N == native.N);
  CHECK(out.omega == native.omega);
  CHECK(out.n == native.n);
  CHECK(out.lambda_band == native.lambda_band);
  CHECK(out.a_tilde_value == native.a_tilde_value);
  CHECK(out.rhs_value == native.rhs_value);
  CHECK(out.s_upper == native.s_upper);
  CHECK(out.gaussian_reliability_ok ==
        (native.gaussian_reliability_ok ? 1 : 0));
  CHECK(out.threshold_ok == (native.threshold_ok ? 1 : 0));
  REQUIRE(out.has_prev == 1);
  CHECK(out.prev_a_tilde == native.prev_a_tilde.value());
  CHECK(out.prev_satisfies == 0);

  // Infeasible: status 3, message names the failure, rhs still reported.
  CHECK(ss_plan(1e-6, 0.1, 2.0, 1.0, model.handle, nullptr, 1.0, 0.75, 3, 0,
                0, &out) == SS_ERR_INFEASIBLE);
  CHECK(std::strstr(ss_last_error(), "infeasible") != nullptr);
  CHECK(out.feasible == 0);
  CHECK(out.rhs_value == required_uniform_bound(1e-6, 0.1, 2.0, 1.0));

  double rhs = 0.0;
  CHECK(ss_required_rhs(0.1, 0.1, 2.0, 1.0, &rhs) == SS_OK);
  CHECK(rhs == required_uniform_bound(0.1, 0.1, 2.0, 1.0));
  CHECK(ss_required_rhs(0.1, 1.5, 2.0, 1.0, &rhs) == SS_ERR_VALIDITY);
}

TEST_CASE("plan sweep mirrors the native sweep") {
  ModelGuard model;
  REQUIRE(ss_model_normalized_tail_create(&model.handle) == SS_OK);
  auto shared = std::make_shared<NormalizedTailModel>();

  PlanRequest base;
  base.T = 1.0;
  base.model = shared;
  const std::vector<double> epsilons{0.05, 0.1, 0.2};
  const std::vector<double> deltas{0.1};
  const std::vector<double> ps{2.0};
  const auto native = plan_sweep(base, epsilons, deltas, ps);

  std::vector<ss_plan_result> cells(3);
  CHECK(ss_plan_sweep(epsilons.data(), 3, deltas.data(), 1, ps.data(), 1,
                      model.handle, nullptr, 1.0, 1.0, 0.75, 40, 0, 0, 0,
                      cells.data()) == SS_OK);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(native[i].result.has_value());
    CHECK(cells[i].feasible == 1);
    CHECK(cells[i].N == native[i].result->N);
    CHECK(cells[i].a_tilde_value == native[i].result->a_tilde_value);
    CHECK(cells[i].rhs_value == native[i].rhs_value);
  }
  CHECK(ss_plan_sweep(nullptr, 0, deltas.data(), 1, ps.data(), 1,
                      model.handle, nullptr, 1.0, 1.0, 0.75, 40, 0, 0, 0,
                      cells.data()) == SS_ERR_ARGUMENT);
}
