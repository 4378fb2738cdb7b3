#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pathwise {

enum class Smoothness { kSmooth, kLipschitz, kDiscontinuous };

/// A named bounded Borel test function g(t, z) -> R with |g| <= bound <= 2.
/// Evaluation is pure; fields are immutable and concurrently callable.
class ScalarField {
 public:
  using Fn = std::function<double(double, std::span<const double>)>;
  using LpNorm = std::function<double(double)>;

  ScalarField(std::string name, int dim, double bound, Smoothness smoothness,
              Fn fn, LpNorm lp_norm = nullptr);

  double operator()(double t, std::span<const double> z) const {
    return fn_(t, z);
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double bound() const { return bound_; }
  Smoothness smoothness() const { return smoothness_; }

  /// Analytic L^p([0,1] x R^d) norm, available for the quadrature catalog
  /// entries (box indicator, Gaussian bump).
  bool has_lp_norm() const { return static_cast<bool>(lp_norm_); }
  double lp_norm(double p) const;

 private:
  std::string name_;
  int dim_;
  double bound_;
  Smoothness smoothness_;
  Fn fn_;
  LpNorm lp_norm_;
};

/// A named bounded Borel drift f(t, x) -> R^d with |f| <= bound <= 1.
class DriftField {
 public:
  using Fn =
      std::function<void(double, std::span<const double>, std::span<double>)>;

  DriftField(std::string name, int dim, double bound, Smoothness smoothness,
             Fn fn);

  void operator()(double t, std::span<const double> x,
                  std::span<double> out) const {
    fn_(t, x, out);
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double bound() const { return bound_; }
  Smoothness smoothness() const { return smoothness_; }

 private:
  std::string name_;
  int dim_;
  double bound_;
  Smoothness smoothness_;
  Fn fn_;
};

/// sign with sign(0) = 0.
inline double sgn(double v) {
  return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0);
}

/// Built-in catalog; names: zero, const_<c>, sign, checkerboard_<m>,
/// radial_step, lip_sin, time_flip, box_indicator, gauss_bump.
/// Throws std::invalid_argument for unknown names.
ScalarField scalar_field(const std::string& name, int dim);

/// Drift catalog over the same names; scalar-formula entries act on the
/// first coordinate of the output and leave the rest zero, keeping the
/// sup-norm reduction |f| <= 1 valid in every dimension.
DriftField drift_field(const std::string& name, int dim);

std::vector<std::string> catalog_names();

/// h(t, z) = g(t, z + x) - g(t, z + y), with the doubled bound tracked.
ScalarField difference_field(const ScalarField& g, std::vector<double> x,
                             std::vector<double> y);

}  // namespace pathwise
