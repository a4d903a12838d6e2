#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "planner.hpp"
#include "spectral.hpp"

using namespace subsample;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSiPi = 1.8519370519824661;

// Independent transcription of the uniform bound along the dyadic schedule
// for the normalized tail model, used as a planning oracle.
double a_tilde_oracle(int stage, double T) {
  const double omega = std::pow(2.0, stage);
  const double n = static_cast<double>(stage) * stage * std::pow(2.0, stage);
  const double lambda = 0.75 * omega;
  const double ratio = omega * T / kPi;
  const double z = (ratio / n) * (ratio / n);
  if (!(z < 1.0)) return std::numeric_limits<double>::infinity();
  const double c =
      std::pow(4.0 * omega * T / (kPi * kPi * (1.0 - z)) +
                   4.0 * (z + 1.0 + 1.0 / n) /
                       (kPi * (1.0 - z) * (1.0 - z) * 0.25),
               2.0);
  const double d =
      2.0 + (2.0 / kPi) * (1.0 + kSiPi + (ratio + 0.5) / (n - ratio));
  const double q = std::min(1.0, 1.0 / lambda);
  return std::sqrt(c) / n + d * std::sqrt(q);
}

PlanRequest base_request() {
  PlanRequest req;
  req.epsilon = 0.1;
  req.delta = 0.1;
  req.p = 2.0;
  req.T = 1.0;
  req.model = std::make_shared<NormalizedTailModel>();
  return req;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TEST_CASE("dyadic schedule") {
  Schedule schedule;
  CHECK(schedule.omega_of(3) == 8.0);
  CHECK(schedule.samples_of(3) == 72);
  const auto scheme = schedule.scheme_of(3);
  CHECK(scheme.omega == 8.0);
  CHECK(scheme.n == 72);
  CHECK(scheme.lambda_band == 6.0);

  Schedule custom;
  custom.n_of = [](int stage) { return 100LL << stage; };
  CHECK(custom.scheme_of(3).n == 800);

  Schedule bad;
  bad.band_ratio = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidityError);
  bad.band_ratio = 0.75;
  bad.max_stage = 0;
  CHECK_THROWS_AS(bad.validate(), ValidityError);
  bad.max_stage = 63;
  CHECK_THROWS_AS(bad.validate(), ValidityError);
}

TEST_CASE("plan picks the first stage the oracle accepts") {
  const auto req = base_request();
  const auto result = plan(req);

  // Scan the transcribed bound directly.
  const double rhs = std::sqrt(0.1) / std::sqrt(2.0 * std::log(20.0));
  int first = 0;
  for (int stage = 1; stage <= 40 && first == 0; ++stage) {
    if (a_tilde_oracle(stage, 1.0) <= rhs) first = stage;
  }
  CHECK(first == 11);

  CHECK(result.N == 11);
  CHECK(result.omega == 2048.0);
  CHECK(result.n == 121LL * 2048LL);
  CHECK(result.lambda_band == 1536.0);
  CHECK(result.a_tilde_value ==
        doctest::Approx(a_tilde_oracle(11, 1.0)).epsilon(1e-12));
  CHECK(result.a_tilde_value ==
        doctest::Approx(0.10076991226041587).epsilon(1e-12));
  CHECK(result.rhs_value ==
        doctest::Approx(0.12919136981535068).epsilon(1e-12));
  CHECK(result.rhs_value == required_uniform_bound(0.1, 0.1, 2.0, 1.0));

  // Bit-equal to the bound evaluated on the chosen scheme.
  const auto scheme = req.schedule.scheme_of(result.N);
  CHECK(result.a_tilde_value == uniform_bound(1.0, scheme, *req.model).total);
  CHECK(result.s_upper == lp_bound_upper(scheme, *req.model, 1.0, 2.0, 1.0));
  CHECK(result.gaussian_reliability_ok);
  CHECK(result.threshold_ok);

  // Minimality certificate: the previous stage missed the target.
  REQUIRE(result.prev_a_tilde.has_value());
  CHECK(result.prev_a_tilde.value() ==
        doctest::Approx(0.14185968262853213).epsilon(1e-12));
  CHECK(result.prev_a_tilde.value() > result.rhs_value);
  CHECK(!result.prev_satisfies);
}

TEST_CASE("an easy target plans at the first stage") {
  auto req = base_request();
  req.epsilon = 1e6;
  req.delta = 0.5;
  const auto result = plan(req);
  CHECK(result.N == 1);
  CHECK(result.omega == 2.0);
  CHECK(result.n == 2);
  CHECK(!result.prev_a_tilde.has_value());
  CHECK(!result.prev_satisfies);
}

TEST_CASE("tighter targets never plan earlier") {
  auto req = base_request();
  std::vector<int> stages;
  for (double eps : {0.2, 0.1, 0.05}) {
    req.epsilon = eps;
    stages.push_back(plan(req).N);
  }
  CHECK(stages[0] == 10);
  CHECK(stages[1] == 11);
  CHECK(stages[2] == 12);

  req.epsilon = 0.1;
  req.delta = 0.01;
  CHECK(plan(req).N >= 11);
}

TEST_CASE("infeasible plans carry the whole trajectory") {
  auto req = base_request();
  req.epsilon = 1e-6;
  req.schedule.max_stage = 3;
  try {
    plan(req);
    FAIL("expected InfeasiblePlanError");
  } catch (const InfeasiblePlanError& e) {
    CHECK(std::string(e.what()).find("plan infeasible: no stage N <= 3") !=
          std::string::npos);
    REQUIRE(e.trace().size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(e.trace()[i].stage == i + 1);
      CHECK(e.trace()[i].z_star_ok);
      CHECK(e.trace()[i].a_tilde > e.trace()[i].rhs);
    }
    CHECK(e.trace()[0].a_tilde > e.trace()[2].a_tilde);
  }
  CHECK_THROWS_AS(plan(PlanRequest{}), std::invalid_argument);
}

TEST_CASE("general reliability route checks both inequalities") {
  auto req = base_request();
  req.epsilon = 2.0;
  req.delta = 0.3;
  req.family = std::make_shared<PowerFamily>(1.5);
  const auto result = plan(req);
  const auto scheme = req.schedule.scheme_of(result.N);

  CHECK(result.a_tilde_value <= result.rhs_value);
  CHECK(result.s_upper == lp_bound_upper(scheme, *req.model, 1.0, 2.0, 1.0));
  CHECK(result.threshold_ok);

  // Recompute both reliability inequalities from the stored S.
  PowerFamily family(1.5);
  CHECK(req.epsilon > validity_threshold(result.s_upper, req.p, family));
  const auto tp = tail_probability(req.epsilon, result.s_upper, req.p, family);
  CHECK(tp.raw <= req.delta);

  // The stage before must fail at least one criterion.
  if (result.prev_a_tilde) {
    const auto prev_scheme = req.schedule.scheme_of(result.N - 1);
    const double prev_s =
        lp_bound_upper(prev_scheme, *req.model, 1.0, 2.0, 1.0);
    const bool prev_target = result.prev_a_tilde.value() <= result.rhs_value;
    bool prev_general = false;
    if (req.epsilon > validity_threshold(prev_s, req.p, family)) {
      prev_general =
          tail_probability(req.epsilon, prev_s, req.p, family).raw <=
          req.delta;
    }
    CHECK(!(prev_target && prev_general));
    CHECK(!result.prev_satisfies);
  }
}

TEST_CASE("forcing the general route on a gaussian family keeps feasibility") {
  auto req = base_request();
  req.force_general_route = true;
  const auto result = plan(req);
  CHECK(result.N == 11);
  CHECK(result.threshold_ok);
  PowerFamily gauss(2.0);
  const auto tp = tail_probability(req.epsilon, result.s_upper, 2.0, gauss);
  CHECK(tp.raw <= req.delta);
}

TEST_CASE("quadrature certification stores the integral it used") {
  auto req = base_request();
  req.use_quadrature_s = true;
  const auto result = plan(req);
  const auto scheme = req.schedule.scheme_of(result.N);
  CHECK(result.s_upper ==
        lp_bound(scheme, *req.model, 1.0, 2.0, 1.0).value);
  const double denominator =
      std::max(2.0, 2.0 * std::log(2.0 / req.delta));
  CHECK(result.s_upper < req.epsilon / denominator);
  CHECK(result.gaussian_reliability_ok);
}

TEST_CASE("sweep over a single cell reproduces plan exactly") {
  const auto req = base_request();
  const auto cells = plan_sweep(req, {0.1}, {0.1}, {2.0});
  REQUIRE(cells.size() == 1);
  const auto direct = plan(req);
  REQUIRE(cells[0].result.has_value());
  const auto& cell = cells[0].result.value();
  CHECK(cell.N == direct.N);
  CHECK(cell.a_tilde_value == direct.a_tilde_value);
  CHECK(cell.s_upper == direct.s_upper);
  CHECK(cells[0].rhs_value == direct.rhs_value);
}

TEST_CASE("sweep walks the grid in declaration order") {
  const auto req = base_request();
  const auto cells = plan_sweep(req, {0.05, 0.1, 0.2}, {0.1}, {2.0});
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].epsilon == 0.05);
  CHECK(cells[1].epsilon == 0.1);
  CHECK(cells[2].epsilon == 0.2);
  CHECK(cells[0].result.value().N == 12);
  CHECK(cells[1].result.value().N == 11);
  CHECK(cells[2].result.value().N == 10);
  CHECK_THROWS_AS(plan_sweep(req, {}, {0.1}, {2.0}), std::domain_error);
}

TEST_CASE("sweep records infeasible cells instead of throwing") {
  auto req = base_request();
  req.schedule.max_stage = 3;
  const auto cells = plan_sweep(req, {1e-6, 1e6}, {0.1}, {2.0});
  REQUIRE(cells.size() == 2);
  CHECK(!cells[0].result.has_value());
  CHECK(cells[0].rhs_value > 0.0);
  CHECK(cells[1].result.has_value());
}

TEST_CASE("alpha tracking rebuilds the family per cell") {
  const auto req = base_request();
  auto tracked = plan_sweep(req, {0.5}, {0.2}, {1.25, 1.5, 2.0}, true);
  REQUIRE(tracked.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = tracked[i].p;
    PlanRequest explicit_req = req;
    explicit_req.epsilon = 0.5;
    explicit_req.delta = 0.2;
    explicit_req.p = p;
    explicit_req.family = std::make_shared<PowerFamily>(p);
    const auto direct = plan(explicit_req);
    REQUIRE(tracked[i].result.has_value());
    CHECK(tracked[i].result.value().N == direct.N);
    CHECK(tracked[i].result.value().a_tilde_value == direct.a_tilde_value);
  }
}

TEST_CASE("sweep csv format is stable") {
  auto req = base_request();
  const auto feasible = plan_sweep(req, {0.1}, {0.1}, {2.0});
  const auto csv = sweep_csv(feasible);
  const auto& r = feasible[0].result.value();
  std::string expected =
      "epsilon,delta,p,N,omega,n,lambda,a_tilde,rhs,feasible\n";
  expected += g17(0.1) + "," + g17(0.1) + "," + g17(2.0) + "," +
              std::to_string(r.N) + "," + g17(r.omega) + "," +
              std::to_string(r.n) + "," + g17(r.lambda_band) + "," +
              g17(r.a_tilde_value) + "," + g17(feasible[0].rhs_value) + ",1\n";
  CHECK(csv == expected);

  req.schedule.max_stage = 2;
  const auto blocked = plan_sweep(req, {1e-6}, {0.1}, {2.0});
  const auto csv2 = sweep_csv(blocked);
  std::string expected2 =
      "epsilon,delta,p,N,omega,n,lambda,a_tilde,rhs,feasible\n";
  expected2 += g17(1e-6) + "," + g17(0.1) + "," + g17(2.0) + ",,,,,," +
               g17(blocked[0].rhs_value) + ",0\n";
  CHECK(csv2 == expected2);
}
