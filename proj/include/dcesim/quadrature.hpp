#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dcesim/errors.hpp"

namespace dcesim {

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes from Newton iteration on the three-term Legendre recurrence.
GaussLegendreRule gauss_legendre(int order);

struct QuadratureOptions {
  int order = 20;
  double rel_tol = 1e-12;  ///< relative to the integral of |f|
  int max_panels = 1 << 14;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_value = 0.0;  ///< integral of |f|, the scale for rel_tol
  int panels = 0;
};

/// Composite Gauss-Legendre on [a, b] with the panel count doubled until two
/// successive estimates agree to rel_tol * integral(|f|). Throws
/// QuadratureNotConverged with the last estimate otherwise.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt = {});

}  // namespace dcesim
