#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "lep/polynomial.hpp"
#include "lep/quadrature.hpp"

namespace lep {

/// Degree-s time polynomial over the unit step, stored by its values at the
/// uniform interpolation abscissae 0, 1/s, ..., 1. The value at abscissa 0
/// is the step's initial state; evaluation anywhere in [0,1] is the unique
/// degree-<=s interpolant through the stored values (barycentric form).
class StagePolynomial {
 public:
  StagePolynomial() = default;
  StagePolynomial(int degree, int dim);
  explicit StagePolynomial(std::vector<Eigen::VectorXd> values);

  int degree() const { return static_cast<int>(values_.size()) - 1; }
  int dim() const { return values_.empty() ? 0 : static_cast<int>(values_[0].size()); }

  Eigen::VectorXd& value(int a) { return values_[a]; }
  const Eigen::VectorXd& value(int a) const { return values_[a]; }
  double abscissa(int a) const { return double(a) / double(degree()); }

  Eigen::VectorXd eval(double tau) const;

  static StagePolynomial scalar(std::vector<double> values);
  double eval_scalar(double tau) const { return eval(tau)(0); }

 private:
  std::vector<Eigen::VectorXd> values_;
};

/// Continuous Runge-Kutta tableau generated by a quadrature rule (b_i, c_i):
/// Lagrange basis l_i over the nodes, and the coefficient polynomial
///   A(tau, sigma) = sum_i (1/b_i) (int_0^tau l_i) l_i(sigma),
/// with constant weight function B == 1. A has degree s in tau and s-1 in
/// sigma; consistency int_0^1 A(tau,sigma) dsigma = tau holds exactly.
class CrkTableau {
 public:
  QuadratureRule rule;
  std::vector<Polynomial> lagrange;           // l_i, degree s-1
  std::vector<Polynomial> lagrange_integral;  // int_0^tau l_i, degree s
  BivariatePolynomial coeff;                  // A(tau, sigma)

  int stages() const { return rule.stages; }

  /// Uniform abscissae a/s, a = 0..s, of the practical stage representation.
  const std::vector<double>& abscissae() const { return abscissae_; }
  /// Uniform Lagrange basis over the abscissae (degree s).
  const std::vector<Polynomial>& value_basis() const { return value_basis_; }

  /// w(a-1, c) = int_0^1 A(tau_a, sigma) lt_c(sigma) dsigma for a = 1..s,
  /// c = 0..s: the exact weights that map stage samples of a degree-<=s
  /// integrand onto the stage updates.
  const Eigen::MatrixXd& stage_weights() const { return stage_weights_; }

  /// g(i, c): <f>_i = sum_c g(i,c) f(tau_c) for any degree-<=s polynomial f.
  const Eigen::MatrixXd& average_weights() const { return average_weights_; }

  /// lmat(a-1, i) = int_0^{tau_a} l_i, a = 1..s: the stage update reads
  /// y^{tau_a} = y^0 + dt * sum_i lmat(a-1,i) <dy/dt>_i.
  const Eigen::MatrixXd& update_matrix() const { return update_matrix_; }
  /// Inverse map: recovers the weighted averages <dy/dt>_i (times dt) from
  /// the abscissa increments y^{tau_a} - y^0.
  const Eigen::MatrixXd& update_matrix_inverse() const { return update_inverse_; }

  /// Coefficient dump (decimal, 17 significant digits, row-major) for
  /// golden-file comparisons.
  std::string dump() const;

 private:
  friend CrkTableau build_crk_tableau(const QuadratureRule&);
  std::vector<double> abscissae_;
  std::vector<Polynomial> value_basis_;
  Eigen::MatrixXd stage_weights_;
  Eigen::MatrixXd average_weights_;
  Eigen::MatrixXd update_matrix_;
  Eigen::MatrixXd update_inverse_;
};

CrkTableau build_crk_tableau(const QuadratureRule& rule);

/// <f>_i = (1/b_i) int_0^1 l_i(tau) f(tau) dtau for a scalar stage
/// polynomial f, evaluated exactly (Gauss formula matched to the integrand
/// degree). Linear in f; i is the 0-based stage index.
double weighted_average(const StagePolynomial& f, const CrkTableau& tableau, int i);

/// Finite-dimensional Hamiltonian system y' = J^{-1} grad H(y) with
/// skew-symmetric invertible structure matrix J.
struct HamiltonianSystem {
  int dimension = 0;
  Eigen::MatrixXd structure;  // J
  std::function<double(const Eigen::VectorXd&)> hamiltonian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// Max polynomial degree of the gradient components; -1 if non-polynomial
  /// (integrals then fall back to a fixed high-order formula and the energy
  /// guarantee weakens to quadrature error).
  int nonlinearity_degree = 1;
};

struct CrkStepResult {
  Eigen::VectorXd y1;
  StagePolynomial stages;
  int iterations = 0;
};

/// One energy-preserving step of size h: solves the stage system
///   y^tau = y0 + h int_0^1 A(tau,sigma) f(y^sigma) dsigma
/// at the uniform abscissae by fixed-point iteration (all stage values
/// initialized to y0) until the successive-sweep max-norm change is <= tol.
/// A(1,sigma) == 1, so the tau=1 stage equation is the update equation.
/// Throws NonConvergenceError when max_iter sweeps do not reach tol.
CrkStepResult crk_step(const HamiltonianSystem& system, const Eigen::VectorXd& y0,
                       double h, const CrkTableau& tableau, double tol,
                       int max_iter);

}  // namespace lep
