#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"

namespace subsample {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
  double value;
  double err;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.err < y.err;
  }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::fabs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  // Scaled difference between the two embedded rules, as in QUADPACK.
  const double diff = std::fabs(resk - resg) * h;
  const double scale = resabs * std::fabs(h);
  double err = diff;
  if (scale > 0.0 && diff > 0.0) {
    err = std::min(diff, scale * std::pow(200.0 * diff / scale, 1.5));
    err = std::max(err, diff * 1e-14);
  }
  p.err = err;
  return p;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opt) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  double sign = 1.0;
  double lo = a, hi = b;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
  heap.push(evaluate_panel(f, lo, hi));
  res.evaluations = 15;
  long panels = 1;

  double total_value = heap.top().value;
  double total_err = heap.top().err;

  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total_value))) {
    if (panels >= opt.max_panels) break;
    Panel worst = heap.top();
    heap.pop();
    total_value -= worst.value;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval no longer splittable at double precision.
      total_value += worst.value;
      total_err += worst.err;
      break;
    }
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    res.evaluations += 30;
    panels += 1;
    heap.push(left);
    heap.push(right);
    total_value += left.value + right.value;
    total_err += left.err + right.err;
    if (total_err < 0.0) total_err = 0.0;
  }

  res.value = sign * total_value;
  res.error_estimate = std::max(total_err, 0.0);
  res.converged = res.error_estimate <=
                  std::max(opt.abs_tol, opt.rel_tol * std::fabs(total_value));
  return res;
}

double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, const QuadratureOptions& opt,
                          const char* what) {
  const QuadratureResult r = integrate(f, a, b, opt);
  if (!r.converged) {
    throw NumericError(std::string(what) +
                           ": quadrature did not converge, residual estimate " +
                           std::to_string(r.error_estimate),
                       r.error_estimate);
  }
  return r.value;
}

}  // namespace subsample
