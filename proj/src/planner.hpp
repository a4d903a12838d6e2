#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "orlicz.hpp"
#include "spectral.hpp"

namespace subsample {

// Dyadic design schedule indexed by a stage N: omega = 2^N, the assumed band
// edge is band_ratio * omega, and the truncation index defaults to N^2 2^N.
struct Schedule {
  double band_ratio = 0.75;
  int max_stage = 40;
  // Override for the stage -> n map; empty uses N^2 2^N.
  std::function<long long(int)> n_of;

  double omega_of(int stage) const;
  long long samples_of(int stage) const;
  SamplingScheme scheme_of(int stage) const;
  void validate() const;
};

struct PlanRequest {
  double epsilon = 0.0;
  double delta = 0.0;
  double p = 2.0;
  double T = 1.0;
  std::shared_ptr<const SpectralModel> model;
  std::shared_ptr<const NFunction> family;  // empty means Gaussian (alpha = 2)
  double c_x = 1.0;
  Schedule schedule{};
  // Certify via the quadrature integral instead of the closed-form envelope
  // T * a_tilde^p.
  bool use_quadrature_s = false;
  // Use the general two-inequality reliability route even when the family is
  // Gaussian.
  bool force_general_route = false;
};

struct PlanResult {
  int N = 0;
  double omega = 0.0;
  long long n = 0;
  double lambda_band = 0.0;
  double a_tilde_value = 0.0;
  double rhs_value = 0.0;
  double s_upper = 0.0;  // the S certified for the reliability inequalities
  // S < epsilon / max(p^{p/2}, (2 ln(2/delta))^{p/2}) at the chosen stage.
  bool gaussian_reliability_ok = false;
  // epsilon exceeds the validity threshold for S at the chosen stage.
  bool threshold_ok = false;
  // Minimality certificate: the previous stage's uniform bound (when one
  // exists below) and whether the previous stage already satisfied the plan
  // criteria (must be false for a minimal stage).
  std::optional<double> prev_a_tilde;
  bool prev_satisfies = false;
};

// Accuracy target the uniform bound must meet:
//   (epsilon / T)^{1/p} / sqrt(max(p, 2 ln(2/delta))).
double required_uniform_bound(double epsilon, double delta, double p, double T);

// Smallest schedule stage whose uniform bound meets the target (and, for
// non-Gaussian families, whose certified S passes the validity threshold and
// reliability inequalities). Throws InfeasiblePlanError with the full search
// trajectory when no stage within the schedule qualifies.
PlanResult plan(const PlanRequest& request);

struct SweepCell {
  double epsilon = 0.0;
  double delta = 0.0;
  double p = 0.0;
  double rhs_value = 0.0;
  std::optional<PlanResult> result;  // empty when the cell is infeasible
};

// Evaluates plan() over the grid product epsilons x deltas x ps; infeasible
// cells are recorded in place rather than thrown. When match_alpha_to_p is
// set, each cell uses the power family with alpha equal to its p.
std::vector<SweepCell> plan_sweep(const PlanRequest& base,
                                  const std::vector<double>& epsilons,
                                  const std::vector<double>& deltas,
                                  const std::vector<double>& ps,
                                  bool match_alpha_to_p = false);

// CSV with header epsilon,delta,p,N,omega,n,lambda,a_tilde,rhs,feasible.
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace subsample
