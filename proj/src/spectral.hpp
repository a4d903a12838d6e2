#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace subsample {

// Second-order model of a centered, wide-sense-stationary, mean-square
// continuous real signal. Exposes the covariance B(tau), the variance B(0),
// and the spectral mass outside a symmetric band,
//   tail_mass(Lambda) = integral of the spectral measure over |lambda| > Lambda.
class SpectralModel {
 public:
  virtual ~SpectralModel() = default;
  virtual double covariance(double tau) const = 0;
  virtual double variance() const { return covariance(0.0); }
  virtual double tail_mass(double lambda) const = 0;
  // Stable identity string used to key per-model caches.
  virtual std::string cache_key() const = 0;
};

// Spectral density 1/(a^2 + lambda^2) with scale a > 0. The covariance has
// the elementary closed form (pi/a) exp(-a |tau|) and the tail mass is
// (2/a) (pi/2 - arctan(Lambda/a)). The process is Markov, which permits an
// exact recursive simulator.
class MaternHalfModel final : public SpectralModel {
 public:
  explicit MaternHalfModel(double alpha_scale);
  double alpha_scale() const noexcept { return alpha_scale_; }
  double covariance(double tau) const override;
  double variance() const override;
  double tail_mass(double lambda) const override;
  double spectral_density(double lambda) const;
  std::string cache_key() const override;

 private:
  double alpha_scale_;
};

// Normalized bound-only model: B(0) = 1 and tail envelope
// Q(Lambda) = min(1, 1/Lambda). The covariance is defined only at lag zero;
// it exists to drive bound evaluation and planning, not simulation.
class NormalizedTailModel final : public SpectralModel {
 public:
  double covariance(double tau) const override;
  double variance() const override { return 1.0; }
  double tail_mass(double lambda) const override;
  std::string cache_key() const override { return "normalized-tail"; }
};

// Even spectral density tabulated on a nonnegative grid, linearly
// interpolated between knots, zero below the first knot, and extended past
// the last knot by a declared power law c * lambda^(-s) matched at the last
// knot. Without a declared tail exponent any quantity that needs mass beyond
// the grid is refused rather than silently truncated.
class TabulatedDensityModel final : public SpectralModel {
 public:
  TabulatedDensityModel(std::vector<double> grid, std::vector<double> density,
                        std::optional<double> tail_exponent);

  double covariance(double tau) const override;
  double variance() const override;
  double tail_mass(double lambda) const override;
  double density_at(double lambda) const;  // the even extension
  std::string cache_key() const override;

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& density() const noexcept { return density_; }
  std::optional<double> tail_exponent() const noexcept { return tail_exponent_; }

 private:
  double tail_coefficient() const;  // c in c * lambda^(-s)
  double require_tail(const char* op) const;
  double grid_mass(double from, double to) const;  // one-sided, interpolant
  double tail_mass_beyond_grid(double from) const;

  std::vector<double> grid_;
  std::vector<double> density_;
  std::optional<double> tail_exponent_;
};

// Loads a tabulated density from a CSV file with header "lambda,density" and
// a metadata JSON file {"tail_exponent": <real>}.
std::shared_ptr<const TabulatedDensityModel> load_tabulated_density(
    const std::string& csv_path, const std::string& meta_json_path);

}  // namespace subsample
