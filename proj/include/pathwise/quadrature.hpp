#pragma once

#include <functional>

namespace pathwise::quadrature {

struct PanelEstimate {
  double kronrod = 0.0;
  double gauss = 0.0;
};

/// One Gauss(7)/Kronrod(15) panel on [a, b].
PanelEstimate gk15(const std::function<double(double)>& f, double a, double b);

/// Adaptive panel-refinement integration of f over [a, b].
/// Splits a panel while |K15 - G7| exceeds the local tolerance share.
double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth = 40);

}  // namespace pathwise::quadrature
