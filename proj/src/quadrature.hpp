#pragma once

#include <functional>

namespace subsample {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  long max_panels = 100000;
};

// Globally adaptive Gauss-Kronrod (G7/K15) integration on a finite interval.
// The worst panel is bisected until the summed error estimate satisfies
// max(abs_tol, rel_tol * |value|) or the panel budget is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opt = {});

// Same, but throws NumericError (with the residual estimate) on failure.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, const QuadratureOptions& opt = {},
                          const char* what = "quadrature");

}  // namespace subsample
