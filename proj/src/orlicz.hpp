#pragma once

#include <functional>
#include <optional>

namespace subsample {

// Orlicz N-function interface: phi is even, convex, phi(0) = 0, and is the
// integral of its density, phi(u) = int_0^|u| density(x) dx. The Young
// conjugate is phi*(x) = sup_y (x y - phi(y)). Plug-in families override the
// closed forms they have; conjugate() falls back to numeric maximization.
class NFunction {
 public:
  virtual ~NFunction() = default;
  virtual double phi(double x) const = 0;
  virtual double density(double x) const = 0;  // requires x >= 0
  virtual double conjugate(double x) const;
  // Exponent when the family is phi(x) = |x|^alpha / alpha, otherwise empty.
  virtual std::optional<double> power_alpha() const { return std::nullopt; }
};

// phi(x) = |x|^alpha / alpha with alpha in (1, 2]. alpha = 2 is the standard
// Gaussian case phi(x) = x^2/2, which is self-conjugate.
class PowerFamily final : public NFunction {
 public:
  explicit PowerFamily(double alpha);

  double alpha() const noexcept { return alpha_; }
  // Conjugate exponent: 1/alpha + 1/gamma = 1.
  double gamma() const noexcept { return gamma_; }

  double phi(double x) const override;
  double density(double x) const override;
  double conjugate(double x) const override;  // |x|^gamma / gamma
  std::optional<double> power_alpha() const override { return alpha_; }

 private:
  double alpha_;
  double gamma_;
};

struct NumericConjugate {
  double value = 0.0;
  // True when the maximizer was pinned at +-radius, i.e. the search radius
  // was too small to contain the true maximizer.
  bool boundary = false;
};

// sup over y in [-radius, radius] of x*y - phi(y), by golden-section search
// on each half interval (the objective is concave for convex phi).
NumericConjugate conjugate_numeric(const std::function<double(double)>& phi,
                                   double x, double radius);
NumericConjugate conjugate_numeric(const NFunction& family, double x,
                                   double radius);

}  // namespace subsample
