#include "wks.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "compensated.hpp"
#include "errors.hpp"

namespace subsample {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMseClamp = -1e-10;
}  // namespace

double sinc_kernel(double omega, double t, long long k) {
  if (!(omega > 0.0)) throw std::domain_error("sinc_kernel: omega must be > 0");
  const double u = omega * t - static_cast<double>(k) * kPi;
  if (std::fabs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

void SampleSet::validate() const {
  if (!(omega > 0.0)) throw ValidityError("samples: omega > 0 violated");
  if (n < 1) throw ValidityError("samples: n >= 1 violated");
  if (values.size() != static_cast<std::size_t>(2 * n + 1)) {
    throw ValidityError("samples: expected 2n+1 = " + std::to_string(2 * n + 1) +
                        " values, got " + std::to_string(values.size()));
  }
}

double reconstruct(const SampleSet& samples, double t) {
  samples.validate();
  KahanSum acc;
  for (long long k = -samples.n; k <= samples.n; ++k) {
    const double w = sinc_kernel(samples.omega, t, k);
    acc.add(w * samples.values[static_cast<std::size_t>(k + samples.n)]);
  }
  return acc.value();
}

std::vector<double> reconstruct_grid(const SampleSet& samples,
                                     const std::vector<double>& grid) {
  samples.validate();
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(reconstruct(samples, t));
  return out;
}

ExactMseEvaluator::ExactMseEvaluator(const SamplingScheme& scheme,
                                     std::shared_ptr<const SpectralModel> model)
    : scheme_(scheme), model_(std::move(model)) {
  scheme_.validate();
  if (!model_) throw std::invalid_argument("ExactMseEvaluator: null model");
  variance_ = model_->variance();
  const double step = kPi / scheme_.omega;
  lags_.resize(static_cast<std::size_t>(2 * scheme_.n + 1));
  for (long long m = 0; m <= 2 * scheme_.n; ++m) {
    lags_[static_cast<std::size_t>(m)] =
        model_->covariance(static_cast<double>(m) * step);
  }
}

double ExactMseEvaluator::operator()(double t) const {
  const long long n = scheme_.n;
  const std::size_t count = static_cast<std::size_t>(2 * n + 1);
  const double step = kPi / scheme_.omega;

  std::vector<double> weights(count);
  for (long long k = -n; k <= n; ++k) {
    weights[static_cast<std::size_t>(k + n)] = sinc_kernel(scheme_.omega, t, k);
  }

  KahanSum cross;
  for (long long k = -n; k <= n; ++k) {
    const double b = model_->covariance(t - static_cast<double>(k) * step);
    cross.add(weights[static_cast<std::size_t>(k + n)] * b);
  }

  KahanSum quad;
  for (std::size_t i = 0; i < count; ++i) {
    const double wi = weights[i];
    if (wi == 0.0) continue;
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t lag = (i >= j) ? (i - j) : (j - i);
      quad.add(wi * weights[j] * lags_[lag]);
    }
  }

  const double value = variance_ - 2.0 * cross.value() + quad.value();
  if (value < 0.0) {
    if (value >= kMseClamp) return 0.0;
    throw NumericError("exact_mse: negative value " + std::to_string(value) +
                           " exceeds the round-off clamp",
                       -value);
  }
  return value;
}

double exact_mse(double t, const SamplingScheme& scheme,
                 const std::shared_ptr<const SpectralModel>& model) {
  if (!model) throw std::invalid_argument("exact_mse: null model");
  using Key = std::tuple<double, long long, std::string>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const ExactMseEvaluator>> cache;

  const Key key{scheme.omega, scheme.n, model->cache_key()};
  std::shared_ptr<const ExactMseEvaluator> eval;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) eval = it->second;
  }
  if (!eval) {
    eval = std::make_shared<const ExactMseEvaluator>(scheme, model);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, eval);
  }
  return (*eval)(t);
}

}  // namespace subsample
