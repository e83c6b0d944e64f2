#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lep {

/// Dense univariate polynomial in monomial form, coeff[k] * x^k.
class Polynomial {
 public:
  Polynomial() : coeff_{0.0} {}
  explicit Polynomial(std::vector<double> coeff);

  static Polynomial constant(double c) { return Polynomial({c}); }
  /// l_i over the given distinct nodes (degree nodes.size()-1).
  static Polynomial lagrange_basis(const std::vector<double>& nodes, int i);

  int degree() const { return static_cast<int>(coeff_.size()) - 1; }
  double operator()(double x) const;

  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  Polynomial derivative() const;
  double integrate(double a, double b) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

  const std::vector<double>& coefficients() const { return coeff_; }

 private:
  std::vector<double> coeff_;
};

/// Bivariate polynomial sum_{m,n} c(m,n) tau^m sigma^n.
/// Storage: c(m,n) = coeff()(m,n), rows index tau powers.
class BivariatePolynomial {
 public:
  BivariatePolynomial() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit BivariatePolynomial(Eigen::MatrixXd c) : c_(std::move(c)) {}

  double operator()(double tau, double sigma) const;

  int degree_tau() const { return static_cast<int>(c_.rows()) - 1; }
  int degree_sigma() const { return static_cast<int>(c_.cols()) - 1; }

  /// integral over sigma in [0,1]; result is a polynomial in tau.
  Polynomial integrate_sigma_unit() const;
  /// Fix tau, leaving a polynomial in sigma.
  Polynomial at_tau(double tau) const;

  /// P(a*tau + b, sigma) expanded back to monomial form.
  BivariatePolynomial substitute_tau_affine(double a, double b) const;
  /// P(tau, a*sigma + b).
  BivariatePolynomial substitute_sigma_affine(double a, double b) const;

  BivariatePolynomial operator+(const BivariatePolynomial& other) const;
  BivariatePolynomial operator-(const BivariatePolynomial& other) const;

  const Eigen::MatrixXd& coeff() const { return c_; }

 private:
  Eigen::MatrixXd c_;
};

}  // namespace lep
