#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "errors.hpp"
#include "spectral.hpp"
#include "wks.hpp"

using namespace subsample;

namespace {

constexpr double kPi = 3.14159265358979323846;

SamplingScheme scheme_of(double omega, long long n, double lambda) {
  SamplingScheme s;
  s.omega = omega;
  s.n = n;
  s.lambda_band = lambda;
  return s;
}

// Recomputes the mean-square error directly from the full Gram matrix,
// bypassing the lag cache.
double mse_direct(double t, const SamplingScheme& scheme,
                  const SpectralModel& model) {
  const long long n = scheme.n;
  std::vector<double> weights(2 * n + 1), times(2 * n + 1);
  for (long long k = -n; k <= n; ++k) {
    weights[k + n] = sinc_kernel(scheme.omega, t, k);
    times[k + n] = static_cast<double>(k) * kPi / scheme.omega;
  }
  double acc = model.variance();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc -= 2.0 * weights[i] * model.covariance(t - times[i]);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      acc += weights[i] * weights[j] * model.covariance(times[i] - times[j]);
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("cardinal kernel interpolates the sample grid") {
  const double omega = 4.0;
  for (long long k = -3; k <= 3; ++k) {
    const double tk = static_cast<double>(k) * kPi / omega;
    CHECK(sinc_kernel(omega, tk, k) == doctest::Approx(1.0).epsilon(1e-15));
    for (long long j = -3; j <= 3; ++j) {
      if (j != k) CHECK(std::fabs(sinc_kernel(omega, tk, j)) < 1e-15);
    }
  }
  // sin(pi/2) / (pi/2) = 2/pi away from the nodes.
  CHECK(sinc_kernel(1.0, kPi / 2.0, 0) ==
        doctest::Approx(0.6366197723675814).epsilon(1e-14));
}

TEST_CASE("cardinal kernel is continuous across the series switch") {
  // The Taylor branch takes over for small |u|; probe both sides of the
  // crossover for several nodes.
  for (double u : {1e-9, 1e-6, 1e-5, 1e-4, 1e-3}) {
    for (long long k : {-2LL, 0LL, 5LL}) {
      const double omega = 3.0;
      const double t_plus = (static_cast<double>(k) * kPi + u) / omega;
      const double t_minus = (static_cast<double>(k) * kPi - u) / omega;
      const double expected = std::sin(u) / u;
      CHECK(sinc_kernel(omega, t_plus, k) ==
            doctest::Approx(expected).epsilon(1e-13));
      CHECK(sinc_kernel(omega, t_minus, k) ==
            doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("reconstruction basics") {
  SampleSet s;
  s.omega = 4.0;
  s.n = 8;
  s.values.assign(17, 0.0);
  CHECK(reconstruct(s, 0.37) == 0.0);

  for (long long k = -8; k <= 8; ++k) {
    s.values[k + 8] = std::cos(0.7 * static_cast<double>(k));
  }
  for (long long k = -8; k <= 8; ++k) {
    const double tk = static_cast<double>(k) * kPi / s.omega;
    CHECK(std::fabs(reconstruct(s, tk) - s.values[k + 8]) < 1e-12);
  }

  const auto grid = std::vector<double>{0.0, 0.25, 0.5};
  const auto out = reconstruct_grid(s, grid);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out[i] == reconstruct(s, grid[i]));
  }
}

TEST_CASE("sample set validation") {
  SampleSet s;
  s.omega = 0.0;
  s.n = 2;
  s.values.assign(5, 0.0);
  CHECK_THROWS_AS(s.validate(), ValidityError);
  s.omega = 4.0;
  s.values.assign(4, 0.0);
  CHECK_THROWS_AS(s.validate(), ValidityError);
  s.values.assign(5, 0.0);
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(reconstruct(SampleSet{}, 0.0), ValidityError);
}

TEST_CASE("truncation error shrinks for a bandlimited signal") {
  // x(t) = cos(2t) is bandlimited well inside omega = 4.
  const double omega = 4.0;
  auto build = [&](long long n) {
    SampleSet s;
    s.omega = omega;
    s.n = n;
    for (long long k = -n; k <= n; ++k) {
      s.values.push_back(std::cos(2.0 * static_cast<double>(k) * kPi / omega));
    }
    return s;
  };
  auto worst = [&](const SampleSet& s) {
    double w = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double t = i / 40.0;
      w = std::max(w, std::fabs(reconstruct(s, t) - std::cos(2.0 * t)));
    }
    return w;
  };
  const double coarse = worst(build(8));
  const double fine = worst(build(64));
  CHECK(fine < coarse);
  CHECK(fine < 0.05);
}

TEST_CASE("exact mse vanishes on the sample grid") {
  auto model = std::make_shared<MaternHalfModel>(1.0);
  const auto scheme = scheme_of(8.0, 72, 6.0);
  ExactMseEvaluator mse(scheme, model);
  CHECK(std::fabs(mse(0.0)) < 1e-12);
  for (long long k = 1; k <= 3; ++k) {
    CHECK(std::fabs(mse(static_cast<double>(k) * kPi / 8.0)) < 1e-9);
  }
  CHECK(mse(0.37) == doctest::Approx(mse(-0.37)).epsilon(1e-12));
  // Never negative, never above the no-estimator ceiling.
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    CHECK(mse(t) >= 0.0);
    CHECK(mse(t) < 4.0 * model->variance());
  }
}

TEST_CASE("exact mse matches a direct Gram recomputation") {
  auto model = std::make_shared<MaternHalfModel>(1.0);
  const auto scheme = scheme_of(8.0, 72, 6.0);
  ExactMseEvaluator mse(scheme, model);
  for (double t : {0.37, 0.62}) {
    const double direct = mse_direct(t, scheme, *model);
    CHECK(mse(t) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("exact mse stays under the pointwise bound") {
  auto model = std::make_shared<MaternHalfModel>(1.0);
  const auto scheme = scheme_of(8.0, 72, 6.0);
  ExactMseEvaluator mse(scheme, model);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    const double rms = pointwise_bound_auto(t, scheme, *model).total;
    CHECK(mse(t) <= rms * rms);
  }
}

TEST_CASE("cached wrapper tracks the evaluator") {
  auto m1 = std::make_shared<MaternHalfModel>(1.0);
  auto m2 = std::make_shared<MaternHalfModel>(2.0);
  const auto scheme = scheme_of(8.0, 72, 6.0);
  ExactMseEvaluator eval(scheme, m1);
  CHECK(exact_mse(0.41, scheme, m1) == eval(0.41));
  CHECK(exact_mse(0.41, scheme, m1) == exact_mse(0.41, scheme, m1));
  // Distinct models may not share cache entries.
  CHECK(exact_mse(0.41, scheme, m1) != exact_mse(0.41, scheme, m2));
}

TEST_CASE("kernel weights approach a partition of unity") {
  const double omega = 4.0, t = 0.3;
  double prev = 1.0;
  for (long long n : {16LL, 64LL, 256LL}) {
    double sum = 0.0;
    for (long long k = -n; k <= n; ++k) sum += sinc_kernel(omega, t, k);
    const double defect = std::fabs(sum - 1.0);
    CHECK(defect < prev);
    prev = defect;
  }
  CHECK(prev < 0.01);
}
