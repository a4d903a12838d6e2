#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subsample {

// Precondition violation. The message names the violated inequality with the
// offending values substituted, so callers can surface it verbatim.
class ValidityError : public std::runtime_error {
 public:
  explicit ValidityError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure (quadrature, factorization, root bracketing) failed
// to reach its tolerance. Carries a residual estimate when one is available.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// One row of the planner's search trajectory.
struct PlanTrace {
  int stage = 0;
  bool z_star_ok = false;
  double a_tilde = 0.0;  // NaN when z* >= 1 at this stage
  double rhs = 0.0;
};

// No stage within the schedule met the planning criteria.
class InfeasiblePlanError : public std::runtime_error {
 public:
  InfeasiblePlanError(const std::string& what, std::vector<PlanTrace> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<PlanTrace>& trace() const noexcept { return trace_; }

 private:
  std::vector<PlanTrace> trace_;
};

}  // namespace subsample
