#include "lep/crk.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lep/errors.hpp"

namespace lep {

namespace {

std::vector<double> uniform_abscissae(int s) {
  std::vector<double> a(s + 1);
  for (int k = 0; k <= s; ++k) a[k] = double(k) / double(s);
  return a;
}

// Binomial coefficients C(s, k) as doubles.
std::vector<double> binomial_row(int s) {
  std::vector<double> b(s + 1, 1.0);
  for (int k = 1; k <= s; ++k) b[k] = b[k - 1] * double(s - k + 1) / double(k);
  return b;
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  out += buf;
}

}  // namespace

StagePolynomial::StagePolynomial(int degree, int dim)
    : values_(degree + 1, Eigen::VectorXd::Zero(dim)) {
  if (degree < 1) throw std::invalid_argument("StagePolynomial: degree must be >= 1");
}

StagePolynomial::StagePolynomial(std::vector<Eigen::VectorXd> values)
    : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("StagePolynomial: need >= 2 values");
}

StagePolynomial StagePolynomial::scalar(std::vector<double> values) {
  std::vector<Eigen::VectorXd> v;
  v.reserve(values.size());
  for (double x : values) v.push_back(Eigen::VectorXd::Constant(1, x));
  return StagePolynomial(std::move(v));
}

Eigen::VectorXd StagePolynomial::eval(double tau) const {
  const int s = degree();
  // barycentric weights for uniform nodes k/s: (-1)^k C(s,k)
  const auto bin = binomial_row(s);
  double num_w = 0.0;
  Eigen::VectorXd num = Eigen::VectorXd::Zero(dim());
  for (int k = 0; k <= s; ++k) {
    const double xk = double(k) / double(s);
    const double d = tau - xk;
    if (std::abs(d) < 1e-300) return values_[k];
    const double w = ((k % 2) ? -bin[k] : bin[k]) / d;
    num += w * values_[k];
    num_w += w;
  }
  return num / num_w;
}

CrkTableau build_crk_tableau(const QuadratureRule& rule) {
  validate(rule);
  const int s = rule.stages;

  CrkTableau t;
  t.rule = rule;
  t.lagrange.reserve(s);
  t.lagrange_integral.reserve(s);
  for (int i = 0; i < s; ++i) {
    t.lagrange.push_back(Polynomial::lagrange_basis(rule.nodes, i));
    t.lagrange_integral.push_back(t.lagrange.back().antiderivative());
  }

  // A(tau,sigma) = sum_i (1/b_i) L_i(tau) l_i(sigma), degree s in tau, s-1 in sigma
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s + 1, s);
  for (int i = 0; i < s; ++i) {
    const auto& L = t.lagrange_integral[i].coefficients();
    const auto& l = t.lagrange[i].coefficients();
    const double inv_b = 1.0 / rule.weights[i];
    for (size_t m = 0; m < L.size(); ++m)
      for (size_t n = 0; n < l.size(); ++n)
        c(m, n) += inv_b * L[m] * l[n];
  }
  t.coeff = BivariatePolynomial(c);

  t.abscissae_ = uniform_abscissae(s);
  t.value_basis_.reserve(s + 1);
  for (int a = 0; a <= s; ++a)
    t.value_basis_.push_back(Polynomial::lagrange_basis(t.abscissae_, a));

  t.stage_weights_ = Eigen::MatrixXd::Zero(s, s + 1);
  for (int a = 1; a <= s; ++a) {
    const Polynomial A_row = t.coeff.at_tau(t.abscissae_[a]);  // degree s-1 in sigma
    for (int cidx = 0; cidx <= s; ++cidx)
      t.stage_weights_(a - 1, cidx) = (A_row * t.value_basis_[cidx]).integrate(0.0, 1.0);
  }

  t.average_weights_ = Eigen::MatrixXd::Zero(s, s + 1);
  for (int i = 0; i < s; ++i)
    for (int cidx = 0; cidx <= s; ++cidx)
      t.average_weights_(i, cidx) =
          (t.lagrange[i] * t.value_basis_[cidx]).integrate(0.0, 1.0) / rule.weights[i];

  t.update_matrix_ = Eigen::MatrixXd::Zero(s, s);
  for (int a = 1; a <= s; ++a)
    for (int i = 0; i < s; ++i)
      t.update_matrix_(a - 1, i) = t.lagrange_integral[i](t.abscissae_[a]);
  t.update_inverse_ = t.update_matrix_.inverse();

  return t;
}

std::string CrkTableau::dump() const {
  std::string out;
  out += "stages " + std::to_string(rule.stages) + "\n";
  out += "order " + std::to_string(rule.order) + "\n";
  out += "nodes";
  for (double v : rule.nodes) { out += ' '; append_number(out, v); }
  out += "\nweights";
  for (double v : rule.weights) { out += ' '; append_number(out, v); }
  out += "\ncoeff_poly rows " + std::to_string(coeff.coeff().rows()) +
         " cols " + std::to_string(coeff.coeff().cols()) + "\n";
  for (int m = 0; m < coeff.coeff().rows(); ++m) {
    for (int n = 0; n < coeff.coeff().cols(); ++n) {
      if (n) out += ' ';
      append_number(out, coeff.coeff()(m, n));
    }
    out += '\n';
  }
  return out;
}

double weighted_average(const StagePolynomial& f, const CrkTableau& tableau, int i) {
  const int s = tableau.stages();
  if (i < 0 || i >= s) throw std::invalid_argument("weighted_average: stage index");
  if (f.dim() != 1) throw std::invalid_argument("weighted_average: scalar polynomial expected");
  const int deg = (s - 1) + f.degree();
  const QuadratureRule q = gauss_legendre_rule_unchecked((deg + 2) / 2);
  double acc = 0.0;
  for (int g = 0; g < q.stages; ++g)
    acc += q.weights[g] * tableau.lagrange[i](q.nodes[g]) * f.eval_scalar(q.nodes[g]);
  return acc / tableau.rule.weights[i];
}

CrkStepResult crk_step(const HamiltonianSystem& system, const Eigen::VectorXd& y0,
                       double h, const CrkTableau& tableau, double tol,
                       int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("crk_step: tol must be positive");
  const int s = tableau.stages();
  const int d = system.dimension;
  if (y0.size() != d) throw std::invalid_argument("crk_step: state dimension mismatch");

  // Quadrature exact for A(tau_a, .) * f(y^sigma): integrand degree
  // (s-1) + m*s with m the gradient degree. Non-polynomial gradients get a
  // fixed high-order formula instead.
  const int m = system.nonlinearity_degree;
  const int npts = (m >= 0) ? std::max(s, (m * s + s + 1) / 2) : 4 * (s + 1);
  const QuadratureRule q = gauss_legendre_rule_unchecked(npts);

  // Precompute A(tau_a, sigma_g) * w_g and the stage-value interpolation
  // weights lt_c(sigma_g).
  Eigen::MatrixXd aw(s, npts);
  for (int a = 1; a <= s; ++a)
    for (int g = 0; g < npts; ++g)
      aw(a - 1, g) = tableau.coeff(tableau.abscissae()[a], q.nodes[g]) * q.weights[g];
  Eigen::MatrixXd interp(npts, s + 1);
  for (int g = 0; g < npts; ++g)
    for (int c = 0; c <= s; ++c)
      interp(g, c) = tableau.value_basis()[c](q.nodes[g]);

  const Eigen::PartialPivLU<Eigen::MatrixXd> j_lu(system.structure);

  std::vector<Eigen::VectorXd> stage(s + 1, y0);  // values at abscissae, [0] fixed
  std::vector<Eigen::VectorXd> next(s + 1, y0);
  std::vector<Eigen::VectorXd> fval(npts, Eigen::VectorXd::Zero(d));

  int converged_at = -1;
  double prev_change = std::numeric_limits<double>::infinity();
  int sweep = 0;
  for (;; ++sweep) {
    for (int g = 0; g < npts; ++g) {
      Eigen::VectorXd yg = Eigen::VectorXd::Zero(d);
      for (int c = 0; c <= s; ++c) yg += interp(g, c) * stage[c];
      fval[g] = j_lu.solve(system.gradient(yg));
    }
    double change = 0.0;
    for (int a = 1; a <= s; ++a) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
      for (int g = 0; g < npts; ++g) acc += aw(a - 1, g) * fval[g];
      next[a] = y0 + h * acc;
      change = std::max(change, (next[a] - stage[a]).cwiseAbs().maxCoeff());
    }
    for (int a = 1; a <= s; ++a) stage[a] = next[a];

    if (converged_at < 0 && change <= tol) converged_at = sweep + 1;
    if (converged_at >= 0) {
      // a few polishing sweeps push the stage residual to the round-off
      // floor; stop once the change no longer decreases
      if (change == 0.0 || change >= prev_change || sweep >= converged_at + 8) break;
    }
    if (sweep + 1 >= max_iter) {
      if (converged_at >= 0) break;
      Eigen::VectorXd flat(d * s);
      for (int a = 1; a <= s; ++a) flat.segment((a - 1) * d, d) = stage[a];
      throw NonConvergenceError("crk_step: fixed-point iteration did not reach tol",
                                sweep + 1, change, flat);
    }
    prev_change = change;
  }

  CrkStepResult result;
  result.stages = StagePolynomial(stage);
  result.y1 = stage[s];
  result.iterations = converged_at;
  return result;
}

}  // namespace lep
