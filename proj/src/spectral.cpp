#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"
#include "quadrature.hpp"

namespace subsample {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

MaternHalfModel::MaternHalfModel(double alpha_scale) : alpha_scale_(alpha_scale) {
  if (!(alpha_scale > 0.0) || !std::isfinite(alpha_scale)) {
    throw std::domain_error("MaternHalfModel: scale must be positive");
  }
}

double MaternHalfModel::covariance(double tau) const {
  return (kPi / alpha_scale_) * std::exp(-alpha_scale_ * std::fabs(tau));
}

double MaternHalfModel::variance() const { return kPi / alpha_scale_; }

double MaternHalfModel::tail_mass(double lambda) const {
  if (lambda < 0.0) {
    throw std::domain_error("tail_mass: lambda must be >= 0");
  }
  return (2.0 / alpha_scale_) * (kPi / 2.0 - std::atan(lambda / alpha_scale_));
}

double MaternHalfModel::spectral_density(double lambda) const {
  return 1.0 / (alpha_scale_ * alpha_scale_ + lambda * lambda);
}

std::string MaternHalfModel::cache_key() const {
  return "matern-half:" + format_double(alpha_scale_);
}

double NormalizedTailModel::covariance(double tau) const {
  if (tau == 0.0) return 1.0;
  throw ValidityError(
      "NormalizedTailModel: covariance is defined only at lag zero; this "
      "model carries a variance and a tail envelope, not a full covariance");
}

double NormalizedTailModel::tail_mass(double lambda) const {
  if (lambda < 0.0) {
    throw std::domain_error("tail_mass: lambda must be >= 0");
  }
  if (lambda <= 1.0) return 1.0;
  return 1.0 / lambda;
}

TabulatedDensityModel::TabulatedDensityModel(std::vector<double> grid,
                                             std::vector<double> density,
                                             std::optional<double> tail_exponent)
    : grid_(std::move(grid)),
      density_(std::move(density)),
      tail_exponent_(tail_exponent) {
  if (grid_.size() != density_.size()) {
    throw std::invalid_argument(
        "TabulatedDensityModel: grid and density sizes differ");
  }
  if (grid_.size() < 2) {
    throw ValidityError("TabulatedDensityModel: need at least two grid points");
  }
  if (!(grid_.front() >= 0.0)) {
    throw ValidityError("TabulatedDensityModel: grid must be nonnegative");
  }
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!(grid_[i] < grid_[i + 1])) {
      throw ValidityError(
          "TabulatedDensityModel: grid must be strictly increasing");
    }
  }
  for (double v : density_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidityError(
          "TabulatedDensityModel: density values must be finite and >= 0");
    }
  }
  if (tail_exponent_ && !(*tail_exponent_ > 1.0)) {
    throw ValidityError(
        "TabulatedDensityModel: tail exponent must exceed 1 for finite mass");
  }
}

double TabulatedDensityModel::tail_coefficient() const {
  // c in c * lambda^{-s}, matched to the density at the last knot.
  if (density_.back() == 0.0) return 0.0;
  return density_.back() * std::pow(grid_.back(), *tail_exponent_);
}

double TabulatedDensityModel::require_tail(const char* op) const {
  // A zero endpoint pins the extrapolated tail to zero under any power law.
  if (!tail_exponent_ && density_.back() != 0.0) {
    throw ValidityError(std::string(op) +
                        ": spectral mass beyond the tabulated grid is needed "
                        "but no tail exponent was declared");
  }
  return tail_exponent_ ? *tail_exponent_ : 2.0;
}

double TabulatedDensityModel::density_at(double lambda) const {
  const double x = std::fabs(lambda);
  if (x < grid_.front()) return 0.0;
  if (x > grid_.back()) {
    if (density_.back() == 0.0) return 0.0;
    const double s = require_tail("density_at");
    return tail_coefficient() * std::pow(x, -s);
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t hi = std::min<std::size_t>(
      grid_.size() - 1, static_cast<std::size_t>(it - grid_.begin()));
  const std::size_t lo = hi - 1;
  const double w = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return density_[lo] + w * (density_[hi] - density_[lo]);
}

double TabulatedDensityModel::grid_mass(double from, double to) const {
  // Exact integral of the piecewise-linear interpolant over [from, to].
  from = std::max(from, grid_.front());
  to = std::min(to, grid_.back());
  if (!(from < to)) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    const double a = std::max(from, grid_[i]);
    const double b = std::min(to, grid_[i + 1]);
    if (!(a < b)) continue;
    acc += 0.5 * (density_at(a) + density_at(b)) * (b - a);
  }
  return acc;
}

double TabulatedDensityModel::tail_mass_beyond_grid(double from) const {
  if (density_.back() == 0.0) return 0.0;
  const double s = require_tail("tail_mass");
  const double c = tail_coefficient();
  const double x = std::max(from, grid_.back());
  return c * std::pow(x, 1.0 - s) / (s - 1.0);
}

double TabulatedDensityModel::variance() const {
  return 2.0 * (grid_mass(grid_.front(), grid_.back()) +
                tail_mass_beyond_grid(grid_.back()));
}

double TabulatedDensityModel::tail_mass(double lambda) const {
  if (lambda < 0.0) {
    throw std::domain_error("tail_mass: lambda must be >= 0");
  }
  if (lambda >= grid_.back()) return 2.0 * tail_mass_beyond_grid(lambda);
  return 2.0 * (grid_mass(lambda, grid_.back()) +
                tail_mass_beyond_grid(grid_.back()));
}

namespace {

// Exact integral of (linear interpolant) * cos(tau x) over one knot segment.
double segment_cosine_integral(double x1, double x2, double g1, double g2,
                               double tau) {
  const double slope = (g2 - g1) / (x2 - x1);
  const double intercept = g1 - slope * x1;
  // int (a x + b) cos(tau x) dx
  //   = a [cos(tau x)/tau^2 + x sin(tau x)/tau] + b sin(tau x)/tau
  const auto antiderivative = [&](double x) {
    const double s = std::sin(tau * x);
    const double c = std::cos(tau * x);
    return slope * (c / (tau * tau) + x * s / tau) + intercept * s / tau;
  };
  return antiderivative(x2) - antiderivative(x1);
}

}  // namespace

double TabulatedDensityModel::covariance(double tau) const {
  const double at = std::fabs(tau);
  if (at == 0.0) return variance();

  // Grid part: 2 * int cos(tau x) g(x) dx over the tabulated range.
  double grid_part = 0.0;
  if (at * grid_.back() < 1e-3) {
    // Nearly constant cosine: the closed form above would difference huge
    // 1/tau^2 terms, so integrate the smooth product directly.
    QuadratureOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-10;
    grid_part = integrate_or_throw(
        [&](double x) { return std::cos(at * x) * density_at(x); },
        grid_.front(), grid_.back(), opt, "tabulated covariance");
  } else {
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
      grid_part += segment_cosine_integral(grid_[i], grid_[i + 1], density_[i],
                                           density_[i + 1], at);
    }
  }

  // Tail part: int_{L}^inf cos(tau x) c x^{-s} dx, summed over half-period
  // lobes with repeated averaging of the alternating partial sums.
  double tail_part = 0.0;
  if (density_.back() != 0.0) {
    const double s = require_tail("covariance");
    const double c = tail_coefficient();
    const double L = grid_.back();
    const double half_period = kPi / at;
    // First lobe boundary: smallest zero of cos(tau x) at or above L.
    const double m0 = std::ceil((at * L / kPi) - 0.5);
    double boundary = (m0 + 0.5) * half_period;
    if (boundary < L) boundary += half_period;

    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-11;
    opt.max_panels = 200;
    const auto f = [&](double x) {
      return std::cos(at * x) * c * std::pow(x, -s);
    };

    double base = 0.0;
    if (boundary > L) base = integrate(f, L, boundary, opt).value;

    constexpr int kLobes = 48;
    std::vector<double> partial(kLobes);
    double acc = base;
    double left = boundary;
    for (int j = 0; j < kLobes; ++j) {
      const double right = left + half_period;
      acc += integrate(f, left, right, opt).value;
      partial[j] = acc;
      left = right;
    }
    // Euler-style repeated averaging; alternating lobe sums converge fast.
    std::vector<double> row = partial;
    double prev = row.back();
    double change = std::fabs(prev);
    while (row.size() > 1) {
      for (std::size_t i = 0; i + 1 < row.size(); ++i) {
        row[i] = 0.5 * (row[i] + row[i + 1]);
      }
      row.pop_back();
      change = std::fabs(row.back() - prev);
      prev = row.back();
    }
    tail_part = prev;
    const double envelope = c * std::pow(left, 1.0 - s) / (s - 1.0);
    const double residual = std::min(change, envelope);
    if (residual > 1e-8 * std::max(1.0, std::fabs(grid_part + tail_part))) {
      throw NumericError(
          "tabulated covariance: oscillatory tail did not converge, residual "
          "estimate " +
              std::to_string(residual),
          residual);
    }
  }

  return 2.0 * (grid_part + tail_part);
}

std::string TabulatedDensityModel::cache_key() const {
  std::ostringstream os;
  os << "tabulated:" << grid_.size() << ':' << format_double(grid_.front())
     << ':' << format_double(grid_.back()) << ':'
     << format_double(density_.front()) << ':' << format_double(density_.back());
  if (tail_exponent_) os << ":s=" << format_double(*tail_exponent_);
  std::size_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    h ^= std::hash<double>{}(grid_[i]) + 0x9e3779b97f4a7c15ull + (h << 6);
    h ^= std::hash<double>{}(density_[i]) + 0x9e3779b97f4a7c15ull + (h << 6);
  }
  os << ":h=" << h;
  return os.str();
}

std::shared_ptr<const TabulatedDensityModel> load_tabulated_density(
    const std::string& csv_path, const std::string& meta_json_path) {
  std::ifstream csv(csv_path);
  if (!csv) {
    throw ValidityError("cannot open density CSV: " + csv_path);
  }
  std::string line;
  if (!std::getline(csv, line)) {
    throw ValidityError("density CSV is empty: " + csv_path);
  }
  // Tolerate BOM / CR and surrounding whitespace in the header.
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) {
                             return c == '\r' || c == ' ' || c == '\t';
                           }),
            s.end());
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF) s.erase(0, 3);
    return s;
  };
  if (strip(line) != "lambda,density") {
    throw ValidityError("density CSV must start with header 'lambda,density'");
  }
  std::vector<double> grid, density;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty()) continue;
    double lam = 0.0, g = 0.0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf%c", &lam, &g, &extra) != 2) {
      throw ValidityError("density CSV: malformed row at line " +
                          std::to_string(line_no));
    }
    grid.push_back(lam);
    density.push_back(g);
  }

  std::ifstream meta(meta_json_path);
  if (!meta) {
    throw ValidityError("cannot open density metadata JSON: " + meta_json_path);
  }
  nlohmann::json j;
  try {
    meta >> j;
  } catch (const std::exception& e) {
    throw ValidityError(std::string("density metadata JSON parse error: ") +
                        e.what());
  }
  if (!j.contains("tail_exponent") || !j["tail_exponent"].is_number()) {
    throw ValidityError(
        "density metadata JSON must contain a numeric 'tail_exponent'");
  }
  const double s = j["tail_exponent"].get<double>();
  return std::make_shared<const TabulatedDensityModel>(std::move(grid),
                                                       std::move(density), s);
}

}  // namespace subsample
