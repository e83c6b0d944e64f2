#include "lep/nls2d.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lep/errors.hpp"
#include "lep/fixed_point.hpp"

namespace lep {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr std::complex<double> kI(0.0, 1.0);

}  // namespace

Nls2dIntegrator::Nls2dIntegrator(Nls2dProblem problem, Scheme scheme)
    : problem_(std::move(problem)), scheme_(scheme) {
  if (!(problem_.tol > 0.0))
    throw std::invalid_argument("Nls2dIntegrator: tol must be positive");
  const int n = problem_.grid.x().size();
  const int m = problem_.grid.y().size();
  const int nm = n * m;

  tableau_ = build_crk_tableau(gauss_legendre_rule(1));

  v1_.resize(nm);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < m; ++l)
      v1_(problem_.grid.index(j, l)) =
          problem_.potential_deriv(0.0, problem_.grid.x().point(j),
                                   problem_.grid.y().point(l));

  // Nonlinear part of V' has xi-degree potential_degree - 1; along the
  // linear-in-sigma stage path the integrand has degree 2*deg - 1, exact
  // under the deg-point Gauss formula.
  quad_points_ = std::max(1, problem_.potential_degree);
  const QuadratureRule q = gauss_legendre_rule_unchecked(quad_points_);
  quad_nodes_ = Eigen::Map<const VectorXd>(q.nodes.data(), q.stages);
  quad_weights_ = Eigen::Map<const VectorXd>(q.weights.data(), q.stages);

  // Dense H = alpha (Dx^2 (x) I + I (x) Dy^2) + diag(V1); both schemes
  // factor I - i (dt/2) H once.
  const MatrixXd dx2 = problem_.grid.x().diff_matrix() * problem_.grid.x().diff_matrix();
  const MatrixXd dy2 = problem_.grid.y().diff_matrix() * problem_.grid.y().diff_matrix();
  MatrixXcd a = MatrixXcd::Zero(nm, nm);
  const std::complex<double> mu = -kI * (0.5 * problem_.dt);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const std::complex<double> w = mu * problem_.alpha * dx2(j, k);
      for (int l = 0; l < m; ++l) a(j * m + l, k * m + l) += w;
    }
  for (int l = 0; l < m; ++l)
    for (int mm = 0; mm < m; ++mm) {
      const std::complex<double> w = mu * problem_.alpha * dy2(l, mm);
      for (int j = 0; j < n; ++j) a(j * m + l, j * m + mm) += w;
    }
  for (int p = 0; p < nm; ++p) a(p, p) += 1.0 + mu * v1_(p);
  lu_.compute(a);
}

Eigen::VectorXcd Nls2dIntegrator::apply_linear(const Eigen::VectorXcd& psi) const {
  // i [alpha (psi_xx + psi_yy) + V1 psi]
  VectorXcd lap = problem_.grid.apply_diff_x(problem_.grid.apply_diff_x(psi));
  lap += problem_.grid.apply_diff_y(problem_.grid.apply_diff_y(psi));
  return kI * (problem_.alpha * lap + v1_.cast<std::complex<double>>().cwiseProduct(psi));
}

Eigen::VectorXcd Nls2dIntegrator::nonlinear(const Eigen::VectorXcd& psi) const {
  const int n = problem_.grid.x().size();
  const int m = problem_.grid.y().size();
  VectorXcd out(psi.size());
  for (int j = 0; j < n; ++j) {
    const double x = problem_.grid.x().point(j);
    for (int l = 0; l < m; ++l) {
      const double y = problem_.grid.y().point(l);
      const int p = problem_.grid.index(j, l);
      const double xi = std::norm(psi(p));
      out(p) = kI * (problem_.potential_deriv(xi, x, y) - v1_(p)) * psi(p);
    }
  }
  return out;
}

Nls2dStepResult Nls2dIntegrator::step(const Nls2dState& y0) const {
  const int nm = problem_.grid.size();
  if (y0.psi.size() != nm)
    throw std::invalid_argument("Nls2dIntegrator::step: state size mismatch");
  const double dt = problem_.dt;

  const VectorXcd l0 = apply_linear(y0.psi);
  VectorXcd psi1 = y0.psi;

  SweepMonitor monitor(problem_.tol, problem_.max_iter, "nls2d");
  double scale = y0.psi.cwiseAbs().maxCoeff();
  for (;;) {
    VectorXcd nl_avg;
    if (scheme_ == Scheme::et2) {
      // <NL> = int_0^1 NL((1-sigma) psi0 + sigma psi1) dsigma, exact Gauss
      nl_avg = VectorXcd::Zero(nm);
      for (int g = 0; g < quad_points_; ++g) {
        const double sg = quad_nodes_(g);
        nl_avg += quad_weights_(g) * nonlinear((1.0 - sg) * y0.psi + sg * psi1);
      }
    } else {
      nl_avg = nonlinear(0.5 * (y0.psi + psi1));
    }
    const VectorXcd rhs = y0.psi + (0.5 * dt) * l0 + dt * nl_avg;
    const VectorXcd next = lu_.solve(rhs);
    const double change = (next - psi1).cwiseAbs().maxCoeff();
    psi1 = next;
    scale = std::max(scale, psi1.cwiseAbs().maxCoeff());
    if (monitor.done(change, scale)) break;
  }

  Nls2dStepResult out;
  out.state = Nls2dState{psi1};
  out.stages.psi = {y0.psi, psi1};
  out.iterations = monitor.iterations();
  return out;
}

Eigen::VectorXd nls2d_energy_density(const Nls2dState& state, const Nls2dProblem& problem) {
  const int n = problem.grid.x().size();
  const int m = problem.grid.y().size();
  const VectorXcd zx = problem.grid.apply_diff_x(state.psi);
  const VectorXcd zy = problem.grid.apply_diff_y(state.psi);
  VectorXd e(n * m);
  for (int j = 0; j < n; ++j) {
    const double x = problem.grid.x().point(j);
    for (int l = 0; l < m; ++l) {
      const double y = problem.grid.y().point(l);
      const int p = problem.grid.index(j, l);
      e(p) = 0.5 * problem.potential(std::norm(state.psi(p)), x, y) -
             0.5 * problem.alpha * (std::norm(zx(p)) + std::norm(zy(p)));
    }
  }
  return e;
}

Nls2dInvariants nls2d_invariants(const Nls2dState& state, const Nls2dProblem& problem) {
  const double cell = problem.grid.x().spacing() * problem.grid.y().spacing();
  Nls2dInvariants inv;
  inv.energy = cell * nls2d_energy_density(state, problem).sum();
  inv.charge = cell * state.psi.cwiseAbs2().sum();
  return inv;
}

Eigen::VectorXd nls2d_ecl_residual(const Nls2dStages& stages, const Nls2dProblem& problem,
                                   const CrkTableau& tableau, double dt) {
  const int s = tableau.stages();
  const int nm = problem.grid.size();
  if (stages.degree() != s)
    throw std::invalid_argument("nls2d_ecl_residual: stage data missing or wrong degree");
  for (const auto& f : stages.psi)
    if (f.size() != nm)
      throw std::invalid_argument("nls2d_ecl_residual: stage length mismatch");

  const MatrixXd& gamma = tableau.average_weights();
  const MatrixXd& linv = tableau.update_matrix_inverse();

  const VectorXd e0 =
      nls2d_energy_density(Nls2dState{stages.psi[0]}, problem);
  const VectorXd e1 =
      nls2d_energy_density(Nls2dState{stages.psi[s]}, problem);

  VectorXd flux = VectorXd::Zero(nm);
  for (int i = 0; i < s; ++i) {
    VectorXcd psi_avg = gamma(i, 0) * stages.psi[0];
    for (int c = 1; c <= s; ++c) psi_avg += gamma(i, c) * stages.psi[c];
    VectorXcd tpsi = VectorXcd::Zero(nm);
    for (int a = 1; a <= s; ++a) tpsi += linv(i, a - 1) * (stages.psi[a] - stages.psi[0]);
    tpsi /= dt;

    const VectorXcd zx = problem.grid.apply_diff_x(psi_avg);
    const VectorXcd zy = problem.grid.apply_diff_y(psi_avg);
    const VectorXcd dx_t = problem.grid.apply_diff_x(tpsi);
    const VectorXcd dy_t = problem.grid.apply_diff_y(tpsi);
    const VectorXcd dx_zx = problem.grid.apply_diff_x(zx);
    const VectorXcd dy_zy = problem.grid.apply_diff_y(zy);

    flux += problem.alpha * tableau.rule.weights[i] *
            ((zx.conjugate().cwiseProduct(dx_t)).real() +
             (tpsi.conjugate().cwiseProduct(dx_zx)).real() +
             (zy.conjugate().cwiseProduct(dy_t)).real() +
             (tpsi.conjugate().cwiseProduct(dy_zy)).real());
  }

  return (e1 - e0) / dt + flux;
}

std::complex<double> nls2d_exact_solution(const std::string& kind, double x, double y,
                                          double t, double amplitude) {
  const double r2 = x * x + y * y;
  if (kind == "gp-attractive")
    return std::sqrt(2.0) * std::exp(-0.5 * r2) * std::exp(-kI * t);
  if (kind == "quintic") {
    const double a4 = std::pow(amplitude, 4);
    return amplitude * std::exp(-0.25 * a4 * r2) * std::exp(-kI * (a4 * t));
  }
  throw std::invalid_argument("nls2d_exact_solution: unknown case id '" + kind + "'");
}

Nls2dProblem make_gp_problem(SpectralGrid2D grid, double beta,
                             std::function<double(double, double)> v1, double dt,
                             double tol, int max_iter) {
  Nls2dProblem p;
  p.alpha = 0.5;
  p.potential = [v1, beta](double xi, double x, double y) {
    return v1(x, y) * xi + 0.5 * beta * xi * xi;
  };
  p.potential_deriv = [v1, beta](double xi, double x, double y) {
    return v1(x, y) + beta * xi;
  };
  p.potential_degree = (beta != 0.0) ? 2 : 1;
  p.grid = std::move(grid);
  p.dt = dt;
  p.tol = tol;
  p.max_iter = max_iter;
  return p;
}

Nls2dProblem make_quintic_problem(SpectralGrid2D grid, double amplitude, double dt,
                                  double tol, int max_iter) {
  const double a4 = std::pow(amplitude, 4);
  // External field matched to the Gaussian breather profile: with
  // V1 = -A^4 ((A^4/4) r^2 + e^{-A^4 r^2}) the quintic equation
  // i psi_t + psi_xx + psi_yy + V1 psi + |psi|^4 psi = 0 admits
  // psi = A e^{-A^4 r^2 / 4} e^{-i A^4 t}.
  auto v1 = [a4](double x, double y) {
    const double r2 = x * x + y * y;
    return -a4 * (0.25 * a4 * r2 + std::exp(-a4 * r2));
  };
  Nls2dProblem p;
  p.alpha = 1.0;
  p.potential = [v1](double xi, double x, double y) {
    return v1(x, y) * xi + xi * xi * xi / 3.0;
  };
  p.potential_deriv = [v1](double xi, double x, double y) {
    return v1(x, y) + xi * xi;
  };
  p.potential_degree = 3;
  p.grid = std::move(grid);
  p.dt = dt;
  p.tol = tol;
  p.max_iter = max_iter;
  return p;
}

Nls2dState nls2d_sample(const SpectralGrid2D& grid,
                        const std::function<std::complex<double>(double, double)>& f) {
  Nls2dState st = Nls2dState::zero(grid.size());
  for (int j = 0; j < grid.x().size(); ++j)
    for (int l = 0; l < grid.y().size(); ++l)
      st.psi(grid.index(j, l)) = f(grid.x().point(j), grid.y().point(l));
  return st;
}

}  // namespace lep
