#include "pathwise/quadrature.hpp"

#include <cmath>

namespace pathwise::quadrature {

namespace {

// QUADPACK dqk15 abscissae/weights (positive half; node 7 is the origin).
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss-7 weights, attached to Kronrod nodes 1, 3, 5, 7.
constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

double adaptive_impl(const std::function<double(double)>& f, double a, double b,
                     double tol, int depth, int max_depth) {
  const PanelEstimate p = gk15(f, a, b);
  const double err = std::fabs(p.kronrod - p.gauss);
  if (err <= tol || depth >= max_depth) return p.kronrod;
  const double mid = 0.5 * (a + b);
  return adaptive_impl(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
         adaptive_impl(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double fv = f(center - dx) + f(center + dx);
    kronrod += kKronrodW[i] * fv;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fv;
  }
  const double f0 = f(center);
  kronrod += kKronrodW[7] * f0;
  gauss += kGaussW[3] * f0;
  return {kronrod * half, gauss * half};
}

double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const PanelEstimate first = gk15(f, a, b);
  const double tol =
      std::max(abs_tol, rel_tol * std::fabs(first.kronrod));
  return adaptive_impl(f, a, b, tol, 0, max_depth);
}

}  // namespace pathwise::quadrature
