#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace rrt {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule rule;
  if (n == 1) return {{0.0}, {2.0}};
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Integrates f over [xl, xr] x [yb, yt] with an n x n tensor Gauss rule.
template <class F>
double integrate_cell(const GaussRule& rule, double xl, double xr, double yb, double yt, F&& f) {
  const double cx = 0.5 * (xl + xr);
  const double cy = 0.5 * (yb + yt);
  const double rx = 0.5 * (xr - xl);
  const double ry = 0.5 * (yt - yb);
  double sum = 0.0;
  for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
    const double y = cy + ry * rule.nodes[b];
    double row = 0.0;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a)
      row += rule.weights[a] * f(cx + rx * rule.nodes[a], y);
    sum += rule.weights[b] * row;
  }
  return sum * rx * ry;
}

/// Integrates f over [l, r] with an n-point Gauss rule.
template <class F>
double integrate_interval(const GaussRule& rule, double l, double r, F&& f) {
  const double c = 0.5 * (l + r);
  const double half = 0.5 * (r - l);
  double sum = 0.0;
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) sum += rule.weights[a] * f(c + half * rule.nodes[a]);
  return sum * half;
}

}  // namespace rrt
