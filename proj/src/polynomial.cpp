#include "lep/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace lep {

namespace {

void trim(std::vector<double>& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

// Rows of Pascal's triangle up to n, for affine substitutions.
std::vector<std::vector<double>> binomials(int n) {
  std::vector<std::vector<double>> b(n + 1);
  for (int i = 0; i <= n; ++i) {
    b[i].assign(i + 1, 1.0);
    for (int j = 1; j < i; ++j) b[i][j] = b[i - 1][j - 1] + b[i - 1][j];
  }
  return b;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeff) : coeff_(std::move(coeff)) {
  if (coeff_.empty()) coeff_ = {0.0};
  trim(coeff_);
}

Polynomial Polynomial::lagrange_basis(const std::vector<double>& nodes, int i) {
  const int s = static_cast<int>(nodes.size());
  if (i < 0 || i >= s) throw std::invalid_argument("lagrange_basis: index out of range");
  Polynomial p({1.0});
  double denom = 1.0;
  for (int j = 0; j < s; ++j) {
    if (j == i) continue;
    if (nodes[j] == nodes[i])
      throw std::invalid_argument("lagrange_basis: duplicate nodes");
    p = p * Polynomial({-nodes[j], 1.0});
    denom *= nodes[i] - nodes[j];
  }
  return p * (1.0 / denom);
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeff_.rbegin(); it != coeff_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> c(coeff_.size() + 1, 0.0);
  for (size_t k = 0; k < coeff_.size(); ++k) c[k + 1] = coeff_[k] / double(k + 1);
  return Polynomial(c);
}

Polynomial Polynomial::derivative() const {
  if (coeff_.size() <= 1) return Polynomial({0.0});
  std::vector<double> c(coeff_.size() - 1);
  for (size_t k = 1; k < coeff_.size(); ++k) c[k - 1] = coeff_[k] * double(k);
  return Polynomial(c);
}

double Polynomial::integrate(double a, double b) const {
  const Polynomial F = antiderivative();
  return F(b) - F(a);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<double> c(std::max(coeff_.size(), other.coeff_.size()), 0.0);
  for (size_t k = 0; k < coeff_.size(); ++k) c[k] += coeff_[k];
  for (size_t k = 0; k < other.coeff_.size(); ++k) c[k] += other.coeff_[k];
  return Polynomial(c);
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + other * (-1.0);
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  std::vector<double> c(coeff_.size() + other.coeff_.size() - 1, 0.0);
  for (size_t i = 0; i < coeff_.size(); ++i)
    for (size_t j = 0; j < other.coeff_.size(); ++j)
      c[i + j] += coeff_[i] * other.coeff_[j];
  return Polynomial(c);
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> c = coeff_;
  for (double& v : c) v *= s;
  return Polynomial(c);
}

double BivariatePolynomial::operator()(double tau, double sigma) const {
  // Horner in tau of Horner-in-sigma rows.
  double acc = 0.0;
  for (int m = static_cast<int>(c_.rows()) - 1; m >= 0; --m) {
    double row = 0.0;
    for (int n = static_cast<int>(c_.cols()) - 1; n >= 0; --n)
      row = row * sigma + c_(m, n);
    acc = acc * tau + row;
  }
  return acc;
}

Polynomial BivariatePolynomial::integrate_sigma_unit() const {
  std::vector<double> out(c_.rows(), 0.0);
  for (int m = 0; m < c_.rows(); ++m)
    for (int n = 0; n < c_.cols(); ++n) out[m] += c_(m, n) / double(n + 1);
  return Polynomial(out);
}

Polynomial BivariatePolynomial::at_tau(double tau) const {
  std::vector<double> out(c_.cols(), 0.0);
  for (int n = 0; n < c_.cols(); ++n) {
    double acc = 0.0;
    for (int m = static_cast<int>(c_.rows()) - 1; m >= 0; --m)
      acc = acc * tau + c_(m, n);
    out[n] = acc;
  }
  return Polynomial(out);
}

BivariatePolynomial BivariatePolynomial::substitute_tau_affine(double a, double b) const {
  const int R = static_cast<int>(c_.rows());
  const auto bin = binomials(R - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(R, c_.cols());
  // tau^m -> (a t + b)^m = sum_k C(m,k) a^k b^{m-k} t^k
  for (int m = 0; m < R; ++m) {
    for (int k = 0; k <= m; ++k) {
      const double w = bin[m][k] * std::pow(a, k) * std::pow(b, m - k);
      if (w != 0.0) out.row(k) += w * c_.row(m);
    }
  }
  return BivariatePolynomial(out);
}

BivariatePolynomial BivariatePolynomial::substitute_sigma_affine(double a, double b) const {
  const int C = static_cast<int>(c_.cols());
  const auto bin = binomials(C - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c_.rows(), C);
  for (int n = 0; n < C; ++n) {
    for (int k = 0; k <= n; ++k) {
      const double w = bin[n][k] * std::pow(a, k) * std::pow(b, n - k);
      if (w != 0.0) out.col(k) += w * c_.col(n);
    }
  }
  return BivariatePolynomial(out);
}

BivariatePolynomial BivariatePolynomial::operator+(const BivariatePolynomial& other) const {
  const int R = std::max(c_.rows(), other.c_.rows());
  const int C = std::max(c_.cols(), other.c_.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(R, C);
  out.topLeftCorner(c_.rows(), c_.cols()) = c_;
  out.topLeftCorner(other.c_.rows(), other.c_.cols()) += other.c_;
  return BivariatePolynomial(out);
}

BivariatePolynomial BivariatePolynomial::operator-(const BivariatePolynomial& other) const {
  const int R = std::max(c_.rows(), other.c_.rows());
  const int C = std::max(c_.cols(), other.c_.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(R, C);
  out.topLeftCorner(c_.rows(), c_.cols()) = c_;
  out.topLeftCorner(other.c_.rows(), other.c_.cols()) -= other.c_;
  return BivariatePolynomial(out);
}

}  // namespace lep
