#include "simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "compensated.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "wks.hpp"

namespace subsample {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sorted(const std::vector<double>& times) {
  if (times.empty()) throw ValidityError("simulate: time grid is empty");
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i] <= times[i + 1])) {
      throw ValidityError("simulate: time grid must be sorted");
    }
  }
  for (double t : times) {
    if (!std::isfinite(t)) throw ValidityError("simulate: non-finite time");
  }
}

void run_parallel(int count, int workers, const std::function<void(int)>& fn) {
  int w = workers <= 0 ? static_cast<int>(std::thread::hardware_concurrency())
                       : workers;
  w = std::max(1, std::min(w, count));
  if (w == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= count) return;
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Realization simulate_auto(const std::shared_ptr<const SpectralModel>& model,
                          std::vector<double> times, std::uint64_t seed) {
  if (const auto* markov = dynamic_cast<const MaternHalfModel*>(model.get())) {
    return simulate_markov(*markov, std::move(times), seed);
  }
  return simulate_cholesky(*model, std::move(times), seed);
}

// Joint grid holding both the scheme's sample instants and the requested
// evaluation instants, de-duplicated so one simulation serves both.
struct JointGrid {
  std::vector<double> times;
  std::vector<std::size_t> sample_pos;  // 2n+1 entries
  std::vector<std::size_t> eval_pos;    // one per evaluation instant
};

JointGrid build_joint_grid(const SamplingScheme& scheme,
                           const std::vector<double>& eval_grid) {
  const double step = kPi / scheme.omega;
  const std::size_t sample_count = static_cast<std::size_t>(2 * scheme.n + 1);

  struct Tagged {
    double t;
    bool is_sample;
    std::size_t index;
  };
  std::vector<Tagged> tagged;
  tagged.reserve(sample_count + eval_grid.size());
  for (long long k = -scheme.n; k <= scheme.n; ++k) {
    tagged.push_back({static_cast<double>(k) * step, true,
                      static_cast<std::size_t>(k + scheme.n)});
  }
  for (std::size_t j = 0; j < eval_grid.size(); ++j) {
    tagged.push_back({eval_grid[j], false, j});
  }
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const Tagged& a, const Tagged& b) { return a.t < b.t; });

  JointGrid grid;
  grid.sample_pos.resize(sample_count);
  grid.eval_pos.resize(eval_grid.size());
  for (const Tagged& tag : tagged) {
    if (grid.times.empty() || grid.times.back() != tag.t) {
      grid.times.push_back(tag.t);
    }
    const std::size_t pos = grid.times.size() - 1;
    if (tag.is_sample) {
      grid.sample_pos[tag.index] = pos;
    } else {
      grid.eval_pos[tag.index] = pos;
    }
  }
  return grid;
}

std::vector<double> uniform_grid(double T, int points) {
  if (!(T > 0.0)) throw std::domain_error("T must be > 0");
  if (points < 2) throw std::domain_error("eval grid needs >= 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    grid[static_cast<std::size_t>(j)] =
        T * static_cast<double>(j) / static_cast<double>(points - 1);
  }
  return grid;
}

// Squared reconstruction errors for one realization on the evaluation grid.
void realization_sq_errors(const SamplingScheme& scheme,
                           const std::shared_ptr<const SpectralModel>& model,
                           const JointGrid& grid,
                           const std::vector<double>& eval_grid,
                           std::uint64_t seed, double* out_sq) {
  const Realization path = simulate_auto(model, grid.times, seed);
  SampleSet samples;
  samples.omega = scheme.omega;
  samples.n = scheme.n;
  samples.values.resize(grid.sample_pos.size());
  for (std::size_t i = 0; i < grid.sample_pos.size(); ++i) {
    samples.values[i] = path.values[grid.sample_pos[i]];
  }
  for (std::size_t j = 0; j < eval_grid.size(); ++j) {
    const double truth = path.values[grid.eval_pos[j]];
    const double rec = reconstruct(samples, eval_grid[j]);
    const double e = truth - rec;
    out_sq[j] = e * e;
  }
}

}  // namespace

Realization simulate_markov(const MaternHalfModel& model,
                            std::vector<double> times, std::uint64_t seed) {
  require_sorted(times);
  const double b0 = model.variance();
  const double a = model.alpha_scale();

  Realization out;
  out.seed = seed;
  out.method = SimulationMethod::markov;
  out.values.resize(times.size());
  out.values[0] = std::sqrt(b0) * rng::gaussian(seed, 0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    const double rho = std::exp(-a * dt);
    const double innovation = std::sqrt(b0 * (1.0 - rho * rho));
    out.values[i] =
        rho * out.values[i - 1] + innovation * rng::gaussian(seed, i);
  }
  out.times = std::move(times);
  return out;
}

Realization simulate_cholesky(const SpectralModel& model,
                              std::vector<double> times, std::uint64_t seed,
                              std::size_t grid_cap) {
  require_sorted(times);
  if (times.size() > grid_cap) {
    throw ValidityError(
        "simulate_cholesky: grid size " + std::to_string(times.size()) +
        " exceeds the cap " + std::to_string(grid_cap) +
        "; for the exponential-covariance model use simulate_markov");
  }
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double value = model.covariance(
          times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(j)]);
      cov(i, j) = value;
      cov(j, i) = value;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt;
  bool factored = false;
  for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
    Eigen::MatrixXd shifted = cov;
    if (jitter > 0.0) {
      shifted.diagonal().array() += jitter;
    }
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      factored = true;
      break;
    }
  }
  if (!factored) {
    throw NumericError(
        "simulate_cholesky: covariance factorization failed even with "
        "diagonal jitter 1e-10");
  }

  Eigen::VectorXd xi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xi(i) = rng::gaussian(seed, static_cast<std::uint64_t>(i));
  }
  const Eigen::VectorXd values = llt.matrixL() * xi;

  Realization out;
  out.seed = seed;
  out.method = SimulationMethod::cholesky;
  out.values.assign(values.data(), values.data() + n);
  out.times = std::move(times);
  return out;
}

McSupRms empirical_sup_rms(const SamplingScheme& scheme,
                           const std::shared_ptr<const SpectralModel>& model,
                           double T, const McConfig& config) {
  return empirical_sup_rms(scheme, model,
                           uniform_grid(T, config.eval_grid_points), config);
}

McSupRms empirical_sup_rms(const SamplingScheme& scheme,
                           const std::shared_ptr<const SpectralModel>& model,
                           const std::vector<double>& eval_grid,
                           const McConfig& config) {
  scheme.validate();
  if (!model) throw std::invalid_argument("empirical_sup_rms: null model");
  if (config.num_realizations < 1) {
    throw std::domain_error("num_realizations must be >= 1");
  }
  if (eval_grid.empty()) throw std::domain_error("evaluation grid is empty");

  const std::size_t g = eval_grid.size();
  const int m = config.num_realizations;
  const JointGrid grid = build_joint_grid(scheme, eval_grid);

  std::vector<double> sq(static_cast<std::size_t>(m) * g);
  run_parallel(m, config.workers, [&](int r) {
    realization_sq_errors(scheme, model, grid, eval_grid,
                          rng::substream(config.master_seed,
                                         static_cast<std::uint64_t>(r)),
                          sq.data() + static_cast<std::size_t>(r) * g);
  });

  // Reductions run in a fixed realization order regardless of worker count.
  McSupRms out;
  out.grid = eval_grid;
  out.per_t_mse.resize(g);
  out.per_t_stderr.resize(g);
  std::vector<double> total_sq(g), total_quad(g);
  for (std::size_t j = 0; j < g; ++j) {
    KahanSum s2, s4;
    for (int r = 0; r < m; ++r) {
      const double e2 = sq[static_cast<std::size_t>(r) * g + j];
      s2.add(e2);
      s4.add(e2 * e2);
    }
    total_sq[j] = s2.value();
    total_quad[j] = s4.value();
    out.per_t_mse[j] = total_sq[j] / m;
    if (m >= 2) {
      double var = (total_quad[j] - total_sq[j] * total_sq[j] / m) / (m - 1);
      if (var < 0.0) var = 0.0;
      out.per_t_stderr[j] = std::sqrt(var / m);
    }
  }

  double sup = 0.0;
  for (double v : out.per_t_mse) sup = std::max(sup, v);
  out.estimate = std::sqrt(sup);

  if (m >= 2) {
    // Jackknife over realizations of the sup statistic.
    std::vector<double> loo(static_cast<std::size_t>(m));
    KahanSum mean_acc;
    for (int r = 0; r < m; ++r) {
      double worst = 0.0;
      for (std::size_t j = 0; j < g; ++j) {
        const double v =
            (total_sq[j] - sq[static_cast<std::size_t>(r) * g + j]) / (m - 1);
        worst = std::max(worst, v);
      }
      loo[static_cast<std::size_t>(r)] = std::sqrt(worst);
      mean_acc.add(loo[static_cast<std::size_t>(r)]);
    }
    const double mean = mean_acc.value() / m;
    KahanSum dev;
    for (double v : loo) dev.add((v - mean) * (v - mean));
    out.stderr_jackknife =
        std::sqrt(std::max(0.0, dev.value()) * (m - 1) / static_cast<double>(m));
  }
  return out;
}

LpExceedance empirical_lp_exceedance(
    const SamplingScheme& scheme,
    const std::shared_ptr<const SpectralModel>& model, double T, double p,
    double epsilon, const McConfig& config, const NFunction& family,
    double c_x) {
  scheme.validate();
  if (!model) throw std::invalid_argument("empirical_lp_exceedance: null model");
  if (!(p >= 1.0)) throw std::domain_error("p must be >= 1");
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  if (config.num_realizations < 1) {
    throw std::domain_error("num_realizations must be >= 1");
  }

  const int coarse_points = config.eval_grid_points;
  if (coarse_points < 2) throw std::domain_error("eval grid needs >= 2 points");
  const int fine_points = 2 * coarse_points - 1;
  const std::vector<double> fine = uniform_grid(T, fine_points);
  const std::size_t g = fine.size();
  const int m = config.num_realizations;
  const JointGrid grid = build_joint_grid(scheme, fine);

  std::vector<double> sq(static_cast<std::size_t>(m) * g);
  run_parallel(m, config.workers, [&](int r) {
    realization_sq_errors(scheme, model, grid, fine,
                          rng::substream(config.master_seed,
                                         static_cast<std::uint64_t>(r)),
                          sq.data() + static_cast<std::size_t>(r) * g);
  });

  const double h_coarse = T / static_cast<double>(coarse_points - 1);
  const double h_fine = 0.5 * h_coarse;
  const double half_p = 0.5 * p;

  int exceed = 0;
  bool grid_warning = false;
  for (int r = 0; r < m; ++r) {
    const double* row = sq.data() + static_cast<std::size_t>(r) * g;
    KahanSum coarse_acc, fine_acc;
    for (std::size_t j = 0; j < g; ++j) {
      const double f = std::pow(row[j], half_p);  // |e|^p from e^2
      const bool endpoint = (j == 0 || j + 1 == g);
      fine_acc.add(endpoint ? 0.5 * f : f);
      if (j % 2 == 0) {
        const bool coarse_endpoint = (j == 0 || j + 2 > g);
        coarse_acc.add(coarse_endpoint ? 0.5 * f : f);
      }
    }
    const double integral_coarse = h_coarse * coarse_acc.value();
    const double integral_fine = h_fine * fine_acc.value();
    if (integral_coarse > epsilon) ++exceed;
    const double rel = std::fabs(integral_fine - integral_coarse) /
                       std::max(std::fabs(integral_fine), 1e-30);
    if (rel > 0.01) grid_warning = true;
  }

  LpExceedance out;
  out.frequency = static_cast<double>(exceed) / static_cast<double>(m);
  out.grid_warning = grid_warning;
  out.s_value = lp_bound(scheme, *model, T, p, c_x).value;
  const double threshold = validity_threshold(out.s_value, p, family);
  if (epsilon > threshold) {
    const TailProbability tp = tail_probability(epsilon, out.s_value, p, family);
    out.bound_raw = tp.raw;
    out.bound = tp.clamped;
    const double b = tp.clamped;
    const double se = std::sqrt(std::max(0.0, b * (1.0 - b)) /
                                static_cast<double>(m));
    out.margin_ok = out.frequency <= b + 3.0 * se;
  }
  return out;
}

PathRecord simulate_reconstruction(
    const SamplingScheme& scheme,
    const std::shared_ptr<const SpectralModel>& model, double T,
    std::uint64_t master_seed, int realization_index, int grid_points) {
  scheme.validate();
  if (!model) throw std::invalid_argument("simulate_reconstruction: null model");
  if (realization_index < 0) {
    throw std::domain_error("realization_index must be >= 0");
  }
  const std::vector<double> eval = uniform_grid(T, grid_points);
  const JointGrid grid = build_joint_grid(scheme, eval);
  const std::uint64_t seed =
      rng::substream(master_seed, static_cast<std::uint64_t>(realization_index));
  const Realization path = simulate_auto(model, grid.times, seed);

  SampleSet samples;
  samples.omega = scheme.omega;
  samples.n = scheme.n;
  samples.values.resize(grid.sample_pos.size());
  for (std::size_t i = 0; i < grid.sample_pos.size(); ++i) {
    samples.values[i] = path.values[grid.sample_pos[i]];
  }

  PathRecord out;
  out.seed = seed;
  out.t = eval;
  out.x.resize(eval.size());
  out.x_n.resize(eval.size());
  for (std::size_t j = 0; j < eval.size(); ++j) {
    out.x[j] = path.values[grid.eval_pos[j]];
    out.x_n[j] = reconstruct(samples, eval[j]);
  }
  return out;
}

}  // namespace subsample
