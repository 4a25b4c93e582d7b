#include "dcesim/quadrature.hpp"

#include <map>
#include <mutex>

#include "dcesim/units.hpp"

namespace dcesim {

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's estimate for the i-th largest root.
    double x = std::cos(units::kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= order; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    if (order == 1) p0 = 1.0;
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[order - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

namespace {

const GaussLegendreRule& cached_rule(int order) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

struct PanelSum {
  double value, abs_value;
};

PanelSum composite(const std::function<double(double)>& f, double a, double b, int panels,
                   const GaussLegendreRule& rule) {
  const double h = (b - a) / panels;
  double sum = 0.0, abs_sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = f(mid + 0.5 * h * rule.nodes[i]);
      s += rule.weights[i] * v;
      sa += rule.weights[i] * std::abs(v);
    }
    sum += s;
    abs_sum += sa;
  }
  return {0.5 * h * sum, 0.5 * h * abs_sum};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt) {
  const auto& rule = cached_rule(opt.order);
  int panels = 1;
  PanelSum prev = composite(f, a, b, panels, rule);
  while (panels < opt.max_panels) {
    panels *= 2;
    const PanelSum cur = composite(f, a, b, panels, rule);
    const double change = std::abs(cur.value - prev.value);
    const double scale = std::max(cur.abs_value, 1e-300);
    if (change <= opt.rel_tol * scale) return {cur.value, cur.abs_value, panels};
    prev = cur;
  }
  throw QuadratureNotConverged(prev.value, std::abs(prev.value), panels);
}

}  // namespace dcesim
