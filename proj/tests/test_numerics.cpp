#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "compensated.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

using namespace subsample;

TEST_CASE("gauss-kronrod handles smooth integrands") {
  auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  r = integrate([](double x) { return std::cos(x); }, 0.0, 10.0 * M_PI);
  CHECK(std::fabs(r.value) < 1e-10);
}

TEST_CASE("reversed limits flip the sign") {
  auto fwd = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  auto rev = integrate([](double x) { return std::exp(x); }, 1.0, 0.0);
  CHECK(fwd.value == doctest::Approx(-rev.value).epsilon(1e-14));
}

TEST_CASE("error estimate is honest on a hard integrand") {
  // Endpoint singularity; a four-panel budget cannot reach the target
  // tolerance, so the estimate must not claim convergence.
  QuadratureOptions opt;
  opt.max_panels = 4;
  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                     opt);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(
      integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); }, 0.0,
                         1.0, opt),
      NumericError);
}

TEST_CASE("degenerate interval integrates to zero") {
  auto r = integrate([](double x) { return std::exp(x); }, 0.7, 0.7);
  CHECK(r.value == 0.0);
  CHECK(r.converged);
}

TEST_CASE("compensated summation beats naive accumulation") {
  KahanSum kahan;
  double naive = 1.0;
  kahan.add(1.0);
  for (int i = 0; i < 1000000; ++i) {
    kahan.add(1e-16);
    naive += 1e-16;
  }
  CHECK(kahan.value() == doctest::Approx(1.0 + 1e-10).epsilon(1e-6));
  CHECK(naive == 1.0);
}

TEST_CASE("keyed draws are deterministic and order-free") {
  CHECK(rng::keyed(42, 0) == rng::keyed(42, 0));
  CHECK(rng::keyed(42, 0) != rng::keyed(42, 1));
  CHECK(rng::keyed(42, 0) != rng::keyed(43, 0));
  CHECK(rng::substream(7, 0) != rng::substream(7, 1));

  double late = rng::uniform01(9, 1000);
  for (int i = 0; i < 1000; ++i) (void)rng::uniform01(9, i);
  CHECK(rng::uniform01(9, 1000) == late);
}

TEST_CASE("uniform draws stay inside the open unit interval") {
  for (int i = 0; i < 10000; ++i) {
    double u = rng::uniform01(123, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal quantile matches reference values") {
  CHECK(rng::normal_quantile(0.5) == 0.0);
  CHECK(rng::normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(rng::normal_quantile(0.025) ==
        doctest::Approx(-1.9599639845400545).epsilon(1e-12));
  CHECK(rng::normal_quantile(0.9) ==
        doctest::Approx(1.2815515655446004).epsilon(1e-12));
  CHECK(rng::normal_quantile(1e-9) ==
        doctest::Approx(-5.9978070150076865).epsilon(1e-12));
  CHECK(rng::normal_quantile(0.3) ==
        doctest::Approx(-0.5244005127080409).epsilon(1e-12));
  CHECK_THROWS_AS((void)rng::normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS((void)rng::normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS((void)rng::normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("gaussian draws have standard moments") {
  const int m = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < m; ++i) {
    double g = rng::gaussian(2024, i);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / m;
  const double var = sumsq / m - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(m)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / m));
}
