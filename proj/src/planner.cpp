#include "planner.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"

namespace subsample {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct StageCheck {
  bool z_star_ok = false;
  bool satisfies = false;
  double a_tilde = std::numeric_limits<double>::quiet_NaN();
  double s_value = 0.0;
  bool gaussian_reliability_ok = false;
  bool threshold_ok = false;
};

}  // namespace

double Schedule::omega_of(int stage) const { return std::ldexp(1.0, stage); }

long long Schedule::samples_of(int stage) const {
  if (n_of) return n_of(stage);
  return static_cast<long long>(stage) * static_cast<long long>(stage)
         << stage;
}

SamplingScheme Schedule::scheme_of(int stage) const {
  SamplingScheme s;
  s.omega = omega_of(stage);
  s.n = samples_of(stage);
  s.lambda_band = band_ratio * s.omega;
  return s;
}

void Schedule::validate() const {
  if (!(band_ratio > 0.0) || !(band_ratio < 1.0)) {
    throw ValidityError("schedule: 0 < band_ratio < 1 violated, band_ratio = " +
                        num(band_ratio));
  }
  if (max_stage < 1 || max_stage > 62) {
    throw ValidityError("schedule: max_stage must lie in [1, 62]");
  }
}

double required_uniform_bound(double epsilon, double delta, double p,
                              double T) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  if (!(p >= 1.0)) throw std::domain_error("p must be >= 1");
  if (!(T > 0.0)) throw std::domain_error("T must be > 0");
  const double reliability = 2.0 * std::log(2.0 / delta);
  return std::pow(epsilon / T, 1.0 / p) / std::sqrt(std::max(p, reliability));
}

namespace {

StageCheck check_stage(const PlanRequest& req, const NFunction& family,
                       bool gaussian_route, double rhs, int stage) {
  StageCheck out;
  const SamplingScheme scheme = req.schedule.scheme_of(stage);
  if (scheme.n < 1) return out;

  const double ratio = scheme.omega * req.T / 3.14159265358979323846;
  const double z_star = (ratio / static_cast<double>(scheme.n)) *
                        (ratio / static_cast<double>(scheme.n));
  if (!(z_star < 1.0)) return out;
  out.z_star_ok = true;

  const BoundBreakdown uniform = uniform_bound(req.T, scheme, *req.model);
  out.a_tilde = uniform.total;

  out.s_value = req.use_quadrature_s
                    ? lp_bound(scheme, *req.model, req.T, req.p, req.c_x).value
                    : lp_bound_upper(scheme, *req.model, req.T, req.p, req.c_x);

  const double reliability = 2.0 * std::log(2.0 / req.delta);
  const double denominator =
      std::max(std::pow(req.p, req.p / 2.0), std::pow(reliability, req.p / 2.0));
  out.gaussian_reliability_ok = out.s_value < req.epsilon / denominator;

  const double threshold = validity_threshold(out.s_value, req.p, family);
  out.threshold_ok = req.epsilon > threshold;
  bool general_ok = false;
  if (out.threshold_ok) {
    const TailProbability tp =
        tail_probability(req.epsilon, out.s_value, req.p, family);
    general_ok = tp.raw <= req.delta;
  }

  const bool meets_target = out.a_tilde <= rhs;
  if (req.use_quadrature_s) {
    out.satisfies =
        gaussian_route ? out.gaussian_reliability_ok : general_ok;
  } else {
    out.satisfies = meets_target && (gaussian_route || general_ok);
  }
  return out;
}

}  // namespace

PlanResult plan(const PlanRequest& req) {
  if (!req.model) throw std::invalid_argument("plan: null model");
  req.schedule.validate();
  const double rhs = required_uniform_bound(req.epsilon, req.delta, req.p, req.T);

  std::shared_ptr<const NFunction> family = req.family;
  if (!family) family = std::make_shared<PowerFamily>(2.0);
  const auto alpha = family->power_alpha();
  const bool gaussian_route =
      !req.force_general_route && alpha.has_value() && *alpha == 2.0;

  std::vector<PlanTrace> trace;
  std::optional<StageCheck> prev;
  for (int stage = 1; stage <= req.schedule.max_stage; ++stage) {
    const StageCheck check = check_stage(req, *family, gaussian_route, rhs, stage);
    trace.push_back({stage, check.z_star_ok, check.a_tilde, rhs});
    if (check.satisfies) {
      const SamplingScheme scheme = req.schedule.scheme_of(stage);
      PlanResult out;
      out.N = stage;
      out.omega = scheme.omega;
      out.n = scheme.n;
      out.lambda_band = scheme.lambda_band;
      out.a_tilde_value = check.a_tilde;
      out.rhs_value = rhs;
      out.s_upper = check.s_value;
      out.gaussian_reliability_ok = check.gaussian_reliability_ok;
      out.threshold_ok = check.threshold_ok;
      if (prev && prev->z_star_ok) {
        out.prev_a_tilde = prev->a_tilde;
        out.prev_satisfies = prev->satisfies;
      }
      return out;
    }
    prev = check;
  }

  std::ostringstream os;
  os << "plan infeasible: no stage N <= " << req.schedule.max_stage
     << " meets the target rhs = " << num(rhs) << "; trajectory (N, a_tilde):";
  for (const PlanTrace& row : trace) {
    os << " (" << row.stage << ", "
       << (row.z_star_ok ? num(row.a_tilde) : std::string("z*>=1")) << ")";
  }
  throw InfeasiblePlanError(os.str(), std::move(trace));
}

std::vector<SweepCell> plan_sweep(const PlanRequest& base,
                                  const std::vector<double>& epsilons,
                                  const std::vector<double>& deltas,
                                  const std::vector<double>& ps,
                                  bool match_alpha_to_p) {
  if (epsilons.empty() || deltas.empty() || ps.empty()) {
    throw std::domain_error("plan_sweep: all grids must be nonempty");
  }
  std::vector<SweepCell> cells;
  cells.reserve(epsilons.size() * deltas.size() * ps.size());
  for (double epsilon : epsilons) {
    for (double delta : deltas) {
      for (double p : ps) {
        PlanRequest req = base;
        req.epsilon = epsilon;
        req.delta = delta;
        req.p = p;
        if (match_alpha_to_p) {
          req.family = std::make_shared<PowerFamily>(p);
        }
        SweepCell cell;
        cell.epsilon = epsilon;
        cell.delta = delta;
        cell.p = p;
        cell.rhs_value = required_uniform_bound(epsilon, delta, p, req.T);
        try {
          cell.result = plan(req);
        } catch (const InfeasiblePlanError&) {
          cell.result.reset();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "epsilon,delta,p,N,omega,n,lambda,a_tilde,rhs,feasible\n";
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (const SweepCell& cell : cells) {
    put(cell.epsilon);
    os << ',';
    put(cell.delta);
    os << ',';
    put(cell.p);
    os << ',';
    if (cell.result) {
      os << cell.result->N << ',';
      put(cell.result->omega);
      os << ',' << cell.result->n << ',';
      put(cell.result->lambda_band);
      os << ',';
      put(cell.result->a_tilde_value);
      os << ',';
      put(cell.rhs_value);
      os << ",1\n";
    } else {
      os << ",,,,,";
      put(cell.rhs_value);
      os << ",0\n";
    }
  }
  return os.str();
}

}  // namespace subsample
