#include "lep/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace lep {

namespace {

// Legendre P_n and P_n' at x, by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) { p = 1.0; dp = 0.0; return; }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre_rule_unchecked(int s) {
  if (s < 1) throw std::invalid_argument("gauss_legendre_rule: s must be positive");
  QuadratureRule rule;
  rule.stages = s;
  rule.order = 2 * s;
  rule.nodes.resize(s);
  rule.weights.resize(s);
  for (int i = 0; i < s; ++i) {
    // i-th root in decreasing order of x; stored mirrored so nodes increase
    double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * s + 2.0));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(s, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(s, x, p, dp);
    rule.nodes[s - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[s - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  // midpoint special case: the recurrence above handles it, but pin exactly
  if (s == 1) {
    rule.nodes[0] = 0.5;
    rule.weights[0] = 1.0;
  }
  return rule;
}

QuadratureRule gauss_legendre_rule(int s) {
  if (s < 1 || s > 10)
    throw std::invalid_argument("gauss_legendre_rule: require 1 <= s <= 10");
  return gauss_legendre_rule_unchecked(s);
}

void validate(const QuadratureRule& rule) {
  if (rule.stages < 1) throw std::invalid_argument("quadrature: empty rule");
  if (static_cast<int>(rule.nodes.size()) != rule.stages ||
      static_cast<int>(rule.weights.size()) != rule.stages)
    throw std::invalid_argument("quadrature: size mismatch");
  double wsum = 0.0;
  for (int i = 0; i < rule.stages; ++i) {
    if (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1]))
      throw std::invalid_argument("quadrature: nodes must be strictly increasing");
    wsum += rule.weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("quadrature: weights must sum to 1");
}

int crk_method_order(const QuadratureRule& rule) {
  const int s = rule.stages;
  const int r = rule.order;
  if (r >= 2 * s - 1) return 2 * s;
  return 2 * r - 2 * s + 2;
}

}  // namespace lep
