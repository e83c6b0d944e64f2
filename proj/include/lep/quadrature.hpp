#pragma once

#include <vector>

namespace lep {

/// A quadrature formula (b_i, c_i) on [0,1]. `order` is the classical
/// order (degree of exactness + 1). For the s-point Gauss rule, order = 2s.
struct QuadratureRule {
  int stages = 0;
  std::vector<double> nodes;    // strictly increasing, in [0,1]
  std::vector<double> weights;  // sum to 1
  int order = 0;
};

/// s-point Gauss-Legendre rule on [0,1]. Nodes by Newton iteration on the
/// Legendre polynomial with Chebyshev starting guesses, converged to 1e-15.
/// Throws std::invalid_argument unless 1 <= s <= 10.
QuadratureRule gauss_legendre_rule(int s);

/// Same nodes/weights without the stage-count cap, for internal use when a
/// high-degree polynomial integrand needs an exact formula.
QuadratureRule gauss_legendre_rule_unchecked(int s);

/// Validates node ordering/distinctness and weight normalization.
/// Throws std::invalid_argument on violation.
void validate(const QuadratureRule& rule);

/// Order of the continuous Runge-Kutta method generated by `rule`:
/// 2s when the quadrature order r >= 2s-1, otherwise 2r-2s+2.
int crk_method_order(const QuadratureRule& rule);

}  // namespace lep
