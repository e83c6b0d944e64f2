#include "lep/cnls.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lep/errors.hpp"
#include "lep/fixed_point.hpp"

namespace lep {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr std::complex<double> kI(0.0, 1.0);

VectorXcd to_complex(const VectorXd& r) { return r.cast<std::complex<double>>(); }

}  // namespace

CnlsIntegrator::CnlsIntegrator(CnlsParams params, Scheme scheme)
    : params_(std::move(params)), scheme_(scheme) {
  if (!(params_.tol > 0.0) || params_.tol > 1e-6)
    throw std::invalid_argument("CnlsIntegrator: tol must lie in (0, 1e-6]");
  const int n = params_.grid.size();
  const MatrixXd& D = params_.grid.diff_matrix();
  const MatrixXd D2 = D * D;
  lin_u_ = (-params_.alpha * D).cast<std::complex<double>>() +
           (0.5 * kI) * D2.cast<std::complex<double>>();
  lin_v_ = (params_.alpha * D).cast<std::complex<double>>() +
           (0.5 * kI) * D2.cast<std::complex<double>>();

  tableau_ = build_crk_tableau(gauss_legendre_rule(2));
  const int s = tableau_.stages();

  if (scheme_ == Scheme::mst4) {
    // collocation tableau of the 2-stage Gauss method: a_jk = int_0^{c_j} l_k
    const QuadratureRule rule = gauss_legendre_rule(2);
    irk_a_.resize(2, 2);
    irk_c_.resize(2);
    for (int j = 0; j < 2; ++j) {
      irk_c_(j) = rule.nodes[j];
      for (int k = 0; k < 2; ++k)
        irk_a_(j, k) =
            Polynomial::lagrange_basis(rule.nodes, k).antiderivative()(rule.nodes[j]);
    }
    VectorXd b(2);
    b << rule.weights[0], rule.weights[1];
    irk_d_ = irk_a_.transpose().partialPivLu().solve(b);

    MatrixXcd bu(2 * n, 2 * n), bv(2 * n, 2 * n);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        MatrixXcd block_u = -params_.dt * irk_a_(i, j) * lin_u_;
        MatrixXcd block_v = -params_.dt * irk_a_(i, j) * lin_v_;
        if (i == j) {
          block_u.diagonal().array() += 1.0;
          block_v.diagonal().array() += 1.0;
        }
        bu.block(i * n, j * n, n, n) = block_u;
        bv.block(i * n, j * n, n, n) = block_v;
      }
    lu_u_.compute(bu);
    lu_v_.compute(bv);
    return;
  }

  // Continuous RK stage system. The cubic terms make the sigma-integrands
  // degree 7, exact under the 4-point Gauss formula; the gl6 variant
  // deliberately uses the 3-point formula instead.
  quad_points_ = (scheme_ == Scheme::et4gl6) ? 3 : 4;
  const QuadratureRule q = gauss_legendre_rule_unchecked(quad_points_);
  quad_aw_.resize(s, quad_points_);
  quad_interp_.resize(quad_points_, s + 1);
  for (int a = 1; a <= s; ++a)
    for (int g = 0; g < quad_points_; ++g)
      quad_aw_(a - 1, g) =
          tableau_.coeff(tableau_.abscissae()[a], q.nodes[g]) * q.weights[g];
  for (int g = 0; g < quad_points_; ++g)
    for (int c = 0; c <= s; ++c)
      quad_interp_(g, c) = tableau_.value_basis()[c](q.nodes[g]);

  const MatrixXd& w = tableau_.stage_weights();
  MatrixXcd bu(s * n, s * n), bv(s * n, s * n);
  for (int a = 1; a <= s; ++a)
    for (int c = 1; c <= s; ++c) {
      MatrixXcd block_u = -params_.dt * w(a - 1, c) * lin_u_;
      MatrixXcd block_v = -params_.dt * w(a - 1, c) * lin_v_;
      if (a == c) {
        block_u.diagonal().array() += 1.0;
        block_v.diagonal().array() += 1.0;
      }
      bu.block((a - 1) * n, (c - 1) * n, n, n) = block_u;
      bv.block((a - 1) * n, (c - 1) * n, n, n) = block_v;
    }
  lu_u_.compute(bu);
  lu_v_.compute(bv);
}

CnlsStepResult CnlsIntegrator::step(const CnlsState& state) const {
  if (state.u.size() != params_.grid.size() || state.v.size() != params_.grid.size())
    throw std::invalid_argument("CnlsIntegrator::step: state size mismatch");
  if (scheme_ == Scheme::mst4) return step_gauss_irk(state);
  return step_crk(state);
}

CnlsStepResult CnlsIntegrator::step_crk(const CnlsState& y0) const {
  const int n = params_.grid.size();
  const int s = tableau_.stages();
  const double dt = params_.dt;
  const double beta = params_.beta;
  const double scale = params_.nonlinearity_scale;
  const MatrixXd& w = tableau_.stage_weights();

  std::vector<VectorXcd> su(s + 1, y0.u), sv(s + 1, y0.v);
  const VectorXcd lu0 = lin_u_ * y0.u;
  const VectorXcd lv0 = lin_v_ * y0.v;

  VectorXcd rhs_u(s * n), rhs_v(s * n);
  std::vector<VectorXcd> nlu(quad_points_), nlv(quad_points_);

  SweepMonitor monitor(params_.tol, params_.max_iter, "cnls");
  double iterate_scale = std::max(y0.u.cwiseAbs().maxCoeff(), y0.v.cwiseAbs().maxCoeff());
  for (;;) {
    for (int g = 0; g < quad_points_; ++g) {
      VectorXcd ug = quad_interp_(g, 0) * su[0];
      VectorXcd vg = quad_interp_(g, 0) * sv[0];
      for (int c = 1; c <= s; ++c) {
        ug += quad_interp_(g, c) * su[c];
        vg += quad_interp_(g, c) * sv[c];
      }
      const VectorXd au = ug.cwiseAbs2(), av = vg.cwiseAbs2();
      const VectorXd wu = scale * (au + beta * av);
      const VectorXd wv = scale * (beta * au + av);
      nlu[g] = kI * ug.cwiseProduct(to_complex(wu));
      nlv[g] = kI * vg.cwiseProduct(to_complex(wv));
    }
    for (int a = 1; a <= s; ++a) {
      VectorXcd acc_u = w(a - 1, 0) * lu0;
      VectorXcd acc_v = w(a - 1, 0) * lv0;
      for (int g = 0; g < quad_points_; ++g) {
        acc_u += quad_aw_(a - 1, g) * nlu[g];
        acc_v += quad_aw_(a - 1, g) * nlv[g];
      }
      rhs_u.segment((a - 1) * n, n) = y0.u + dt * acc_u;
      rhs_v.segment((a - 1) * n, n) = y0.v + dt * acc_v;
    }
    const VectorXcd xu = lu_u_.solve(rhs_u);
    const VectorXcd xv = lu_v_.solve(rhs_v);

    double change = 0.0;
    for (int a = 1; a <= s; ++a) {
      change = std::max(change,
                        (xu.segment((a - 1) * n, n) - su[a]).cwiseAbs().maxCoeff());
      change = std::max(change,
                        (xv.segment((a - 1) * n, n) - sv[a]).cwiseAbs().maxCoeff());
      su[a] = xu.segment((a - 1) * n, n);
      sv[a] = xv.segment((a - 1) * n, n);
      iterate_scale = std::max(
          {iterate_scale, su[a].cwiseAbs().maxCoeff(), sv[a].cwiseAbs().maxCoeff()});
    }
    if (monitor.done(change, iterate_scale)) break;
  }

  CnlsStepResult out;
  out.state = CnlsState{su[s], sv[s]};
  out.stages = CnlsStages{std::move(su), std::move(sv)};
  out.iterations = monitor.iterations();
  return out;
}

CnlsStepResult CnlsIntegrator::step_gauss_irk(const CnlsState& y0) const {
  const int n = params_.grid.size();
  const double dt = params_.dt;
  const double beta = params_.beta;
  const double scale = params_.nonlinearity_scale;

  std::vector<VectorXcd> su(2, y0.u), sv(2, y0.v);  // internal stage values
  VectorXcd rhs_u(2 * n), rhs_v(2 * n);

  auto nonlin = [&](const VectorXcd& u, const VectorXcd& v, VectorXcd& outu,
                    VectorXcd& outv) {
    const VectorXd au = u.cwiseAbs2(), av = v.cwiseAbs2();
    outu = kI * u.cwiseProduct(to_complex(VectorXd(scale * (au + beta * av))));
    outv = kI * v.cwiseProduct(to_complex(VectorXd(scale * (beta * au + av))));
  };

  SweepMonitor monitor(params_.tol, params_.max_iter, "mst4");
  double iterate_scale = std::max(y0.u.cwiseAbs().maxCoeff(), y0.v.cwiseAbs().maxCoeff());
  for (;;) {
    VectorXcd nu0(n), nv0(n), nu1(n), nv1(n);
    nonlin(su[0], sv[0], nu0, nv0);
    nonlin(su[1], sv[1], nu1, nv1);
    rhs_u.segment(0, n) = y0.u + dt * (irk_a_(0, 0) * nu0 + irk_a_(0, 1) * nu1);
    rhs_u.segment(n, n) = y0.u + dt * (irk_a_(1, 0) * nu0 + irk_a_(1, 1) * nu1);
    rhs_v.segment(0, n) = y0.v + dt * (irk_a_(0, 0) * nv0 + irk_a_(0, 1) * nv1);
    rhs_v.segment(n, n) = y0.v + dt * (irk_a_(1, 0) * nv0 + irk_a_(1, 1) * nv1);
    const VectorXcd xu = lu_u_.solve(rhs_u);
    const VectorXcd xv = lu_v_.solve(rhs_v);

    double change = 0.0;
    for (int i = 0; i < 2; ++i) {
      change = std::max(change, (xu.segment(i * n, n) - su[i]).cwiseAbs().maxCoeff());
      change = std::max(change, (xv.segment(i * n, n) - sv[i]).cwiseAbs().maxCoeff());
      su[i] = xu.segment(i * n, n);
      sv[i] = xv.segment(i * n, n);
      iterate_scale = std::max(
          {iterate_scale, su[i].cwiseAbs().maxCoeff(), sv[i].cwiseAbs().maxCoeff()});
    }
    if (monitor.done(change, iterate_scale)) break;
  }

  // u1 = u0 + sum_i d_i (U_i - u0); for the 2-stage Gauss tableau this is
  // also the value at tau = 1 of the collocation polynomial.
  CnlsStepResult out;
  out.state.u = y0.u + irk_d_(0) * (su[0] - y0.u) + irk_d_(1) * (su[1] - y0.u);
  out.state.v = y0.v + irk_d_(0) * (sv[0] - y0.v) + irk_d_(1) * (sv[1] - y0.v);

  // collocation polynomial sampled at the uniform abscissae {0, 1/2, 1}
  const std::vector<double> nodes = {0.0, irk_c_(0), irk_c_(1)};
  out.stages.u.resize(3);
  out.stages.v.resize(3);
  out.stages.u[0] = y0.u;
  out.stages.v[0] = y0.v;
  for (int a = 1; a <= 2; ++a) {
    const double tau = 0.5 * a;
    double c0 = Polynomial::lagrange_basis(nodes, 0)(tau);
    double c1 = Polynomial::lagrange_basis(nodes, 1)(tau);
    double c2 = Polynomial::lagrange_basis(nodes, 2)(tau);
    out.stages.u[a] = c0 * y0.u + c1 * su[0] + c2 * su[1];
    out.stages.v[a] = c0 * y0.v + c1 * sv[0] + c2 * sv[1];
  }
  out.iterations = monitor.iterations();
  return out;
}

VectorXd cnls_energy_density(const CnlsState& state, const SpectralGrid1D& grid,
                             double alpha, double beta, double nonlinearity_scale) {
  const VectorXcd pu = 0.5 * grid.apply_diff(state.u);
  const VectorXcd pv = 0.5 * grid.apply_diff(state.v);
  const VectorXcd dpu = grid.apply_diff(pu);
  const VectorXcd dpv = grid.apply_diff(pv);

  const VectorXd au = state.u.cwiseAbs2(), av = state.v.cwiseAbs2();
  const VectorXd apu = pu.cwiseAbs2(), apv = pv.cwiseAbs2();

  const VectorXd s_density =
      -nonlinearity_scale *
          (0.25 * au.cwiseProduct(au) + 0.25 * av.cwiseProduct(av) +
           0.5 * beta * au.cwiseProduct(av)) -
      (apu + apv);
  const VectorXd alpha_term =
      alpha * (-(state.u.conjugate().cwiseProduct(pu)).imag() +
               (state.v.conjugate().cwiseProduct(pv)).imag());
  // (1/2) sum_i (q_i d_x p_i - 2 p_i^2)
  const VectorXd grad_term =
      0.5 * ((state.u.conjugate().cwiseProduct(dpu)).real() +
             (state.v.conjugate().cwiseProduct(dpv)).real()) -
      (apu + apv);
  return s_density - alpha_term - grad_term;
}

double cnls_energy(const CnlsState& state, const SpectralGrid1D& grid, double alpha,
                   double beta, double nonlinearity_scale) {
  return grid.spacing() *
         cnls_energy_density(state, grid, alpha, beta, nonlinearity_scale).sum();
}

CnlsInvariants cnls_invariants(const CnlsState& state, const SpectralGrid1D& grid,
                               double alpha, double beta, double nonlinearity_scale) {
  CnlsInvariants inv;
  inv.energy = cnls_energy(state, grid, alpha, beta, nonlinearity_scale);
  inv.charge_u = grid.spacing() * state.u.cwiseAbs2().sum();
  inv.charge_v = grid.spacing() * state.v.cwiseAbs2().sum();
  const VectorXcd pu = 0.5 * grid.apply_diff(state.u);
  const VectorXcd pv = 0.5 * grid.apply_diff(state.v);
  inv.momentum = -grid.spacing() *
                 ((state.u.conjugate().cwiseProduct(pu)).imag().sum() +
                  (state.v.conjugate().cwiseProduct(pv)).imag().sum());
  return inv;
}

Eigen::VectorXd cnls_ecl_residual(const CnlsStages& stages, const SpectralGrid1D& grid,
                                  const CrkTableau& tableau, double dt, double alpha,
                                  double beta, double nonlinearity_scale) {
  const int s = tableau.stages();
  const int n = grid.size();
  if (stages.degree() != s || static_cast<int>(stages.v.size()) != s + 1)
    throw std::invalid_argument("cnls_ecl_residual: stage data missing or wrong degree");
  for (int a = 0; a <= s; ++a)
    if (stages.u[a].size() != n || stages.v[a].size() != n)
      throw std::invalid_argument("cnls_ecl_residual: stage length mismatch");

  std::vector<VectorXcd> pu(s + 1), pv(s + 1);
  for (int a = 0; a <= s; ++a) {
    pu[a] = 0.5 * grid.apply_diff(stages.u[a]);
    pv[a] = 0.5 * grid.apply_diff(stages.v[a]);
  }

  const MatrixXd& gamma = tableau.average_weights();
  const MatrixXd& linv = tableau.update_matrix_inverse();
  auto average = [&](const std::vector<VectorXcd>& f, int i) {
    VectorXcd acc = gamma(i, 0) * f[0];
    for (int c = 1; c <= s; ++c) acc += gamma(i, c) * f[c];
    return acc;
  };
  // <d/dt f>_i recovered from the abscissa increments via the update matrix
  auto time_average = [&](const std::vector<VectorXcd>& f, int i) {
    VectorXcd acc = VectorXcd::Zero(n);
    for (int a = 1; a <= s; ++a) acc += linv(i, a - 1) * (f[a] - f[0]);
    return VectorXcd((1.0 / dt) * acc);
  };

  const CnlsState s0{stages.u[0], stages.v[0]};
  const CnlsState s1{stages.u[s], stages.v[s]};
  const VectorXd e0 = cnls_energy_density(s0, grid, alpha, beta, nonlinearity_scale);
  const VectorXd e1 = cnls_energy_density(s1, grid, alpha, beta, nonlinearity_scale);

  VectorXd flux_div = VectorXd::Zero(n);
  for (int i = 0; i < s; ++i) {
    const VectorXcd ui = average(stages.u, i), vi = average(stages.v, i);
    const VectorXcd pui = average(pu, i), pvi = average(pv, i);
    const VectorXcd tui = time_average(stages.u, i), tvi = time_average(stages.v, i);
    const VectorXcd tpui = time_average(pu, i), tpvi = time_average(pv, i);

    auto dapply = [&](const VectorXcd& f) { return grid.apply_diff(f); };
    const VectorXcd d_tui = dapply(tui), d_tvi = dapply(tvi);
    const VectorXcd d_ui = dapply(ui), d_vi = dapply(vi);
    const VectorXcd d_tpui = dapply(tpui), d_tpvi = dapply(tpvi);
    const VectorXcd d_pui = dapply(pui), d_pvi = dapply(pvi);

    VectorXd term =
        alpha * (-(ui.conjugate().cwiseProduct(d_tui)).imag() +
                 (vi.conjugate().cwiseProduct(d_tvi)).imag() +
                 (tui.conjugate().cwiseProduct(d_ui)).imag() -
                 (tvi.conjugate().cwiseProduct(d_vi)).imag());
    term += (ui.conjugate().cwiseProduct(d_tpui)).real() +
            (vi.conjugate().cwiseProduct(d_tpvi)).real() -
            (pui.conjugate().cwiseProduct(d_tui)).real() -
            (pvi.conjugate().cwiseProduct(d_tvi)).real();
    term += (tpui.conjugate().cwiseProduct(d_ui)).real() +
            (tpvi.conjugate().cwiseProduct(d_vi)).real() -
            (tui.conjugate().cwiseProduct(d_pui)).real() -
            (tvi.conjugate().cwiseProduct(d_pvi)).real();

    flux_div += 0.5 * tableau.rule.weights[i] * term;
  }

  return (e1 - e0) / dt + flux_div;
}

std::pair<std::complex<double>, std::complex<double>> cnls_exact_solution(double x,
                                                                          double t) {
  const double inv_sqrt10 = 1.0 / std::sqrt(10.0);
  const std::complex<double> u =
      (1.0 / std::cosh(x)) * std::exp(kI * (0.5 * t));
  const std::complex<double> v = (1.0 / std::cosh(x - t * inv_sqrt10)) *
                                 std::exp(kI * (x * inv_sqrt10 + 0.45 * t));
  return {u, v};
}

CnlsState cnls_benchmark_state(const SpectralGrid1D& grid, double t) {
  CnlsState st = CnlsState::zero(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const auto [u, v] = cnls_exact_solution(grid.point(j), t);
    st.u(j) = u;
    st.v(j) = v;
  }
  return st;
}

CnlsState cnls_soliton_train_state(const SpectralGrid1D& grid, double alpha, double beta,
                                   const std::vector<SolitonComponent>& train) {
  CnlsState st = CnlsState::zero(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j);
    for (const auto& comp : train) {
      const double amp = std::sqrt(2.0 * comp.amplitude / (1.0 + beta));
      const double width = std::sqrt(2.0 * comp.amplitude);
      const double envelope = amp / std::cosh(width * (x - comp.center));
      st.u(j) += envelope * std::exp(kI * ((comp.velocity - alpha) * (x - comp.center)));
      st.v(j) += envelope * std::exp(kI * ((comp.velocity + alpha) * (x - comp.center)));
    }
  }
  return st;
}

}  // namespace lep
