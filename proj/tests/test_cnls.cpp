#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "lep/cnls.hpp"
#include "lep/errors.hpp"

using namespace lep;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

CnlsParams benchmark_params(int n = 300, double dt = 0.4) {
  CnlsParams p;
  p.alpha = 0.0;
  p.beta = 0.0;
  p.grid = SpectralGrid1D(-30.0, 60.0, n);
  p.dt = dt;
  p.tol = 1e-14;
  p.max_iter = 200;
  return p;
}

// Direct evaluation of the local conservation-law residual in real
// components, with the double sum over grid pairs written out against the
// differentiation matrix. Independent of the complex-arithmetic library
// path.
VectorXd direct_ecl_residual(const CnlsStages& stages, const SpectralGrid1D& grid,
                             const CrkTableau& tab, double dt, double alpha,
                             double beta) {
  const int s = tab.stages();
  const int n = grid.size();
  const MatrixXd& d = grid.diff_matrix();

  std::vector<std::vector<VectorXd>> q(4, std::vector<VectorXd>(s + 1));
  std::vector<std::vector<VectorXd>> p(4, std::vector<VectorXd>(s + 1));
  for (int a = 0; a <= s; ++a) {
    q[0][a] = stages.u[a].real();
    q[1][a] = stages.u[a].imag();
    q[2][a] = stages.v[a].real();
    q[3][a] = stages.v[a].imag();
    for (int g = 0; g < 4; ++g) p[g][a] = 0.5 * (d * q[g][a]);
  }

  const MatrixXd& gam = tab.average_weights();
  const MatrixXd& linv = tab.update_matrix_inverse();
  auto avg = [&](const std::vector<VectorXd>& f, int i) {
    VectorXd acc = gam(i, 0) * f[0];
    for (int c = 1; c <= s; ++c) acc += gam(i, c) * f[c];
    return acc;
  };
  auto tavg = [&](const std::vector<VectorXd>& f, int i) {
    VectorXd acc = VectorXd::Zero(n);
    for (int a = 1; a <= s; ++a) acc += linv(i, a - 1) * (f[a] - f[0]);
    return VectorXd(acc / dt);
  };

  auto energy_at = [&](int a) {
    VectorXd e(n);
    for (int j = 0; j < n; ++j) {
      const double q1 = q[0][a](j), q2 = q[1][a](j), q3 = q[2][a](j), q4 = q[3][a](j);
      const double p1 = p[0][a](j), p2 = p[1][a](j), p3 = p[2][a](j), p4 = p[3][a](j);
      const double nu = q1 * q1 + q2 * q2, nv = q3 * q3 + q4 * q4;
      double sdens = -0.25 * nu * nu - 0.25 * nv * nv - 0.5 * beta * nu * nv -
                     (p1 * p1 + p2 * p2 + p3 * p3 + p4 * p4);
      double grad_term = 0.0;
      for (int g = 0; g < 4; ++g)
        grad_term += q[g][a](j) * (d.row(j) * p[g][a])(0) - 2.0 * p[g][a](j) * p[g][a](j);
      e(j) = sdens - alpha * (q2 * p1 - q1 * p2 + q3 * p4 - q4 * p3) - 0.5 * grad_term;
    }
    return e;
  };

  const VectorXd e0 = energy_at(0), e1 = energy_at(s);

  VectorXd flux_div = VectorXd::Zero(n);
  for (int i = 0; i < s; ++i) {
    std::vector<VectorXd> qa(4), pa(4), tq(4), tp(4);
    for (int g = 0; g < 4; ++g) {
      qa[g] = avg(q[g], i);
      pa[g] = avg(p[g], i);
      tq[g] = tavg(q[g], i);
      tp[g] = tavg(p[g], i);
    }
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        double phi_jk =
            alpha * (qa[1](j) * tq[0](k) - qa[0](j) * tq[1](k) + qa[2](j) * tq[3](k) -
                     qa[3](j) * tq[2](k));
        double phi_kj =
            alpha * (qa[1](k) * tq[0](j) - qa[0](k) * tq[1](j) + qa[2](k) * tq[3](j) -
                     qa[3](k) * tq[2](j));
        for (int g = 0; g < 4; ++g) {
          phi_jk += qa[g](j) * tp[g](k) - pa[g](j) * tq[g](k);
          phi_kj += qa[g](k) * tp[g](j) - pa[g](k) * tq[g](j);
        }
        acc += d(j, k) * 0.5 * (phi_jk + phi_kj);
      }
      flux_div(j) += tab.rule.weights[i] * acc;
    }
  }
  return (e1 - e0) / dt + flux_div;
}

}  // namespace

TEST_CASE("exact solution: initial condition and constant modulus") {
  for (double x : {-3.0, 0.0, 1.7}) {
    const auto [u0, v0] = cnls_exact_solution(x, 0.0);
    CHECK(std::abs(u0 - 1.0 / std::cosh(x)) < 1e-15);
    CHECK(std::abs(v0 - (1.0 / std::cosh(x)) * std::exp(kI * (x / std::sqrt(10.0)))) <
          1e-15);
    for (double t : {0.7, 4.0}) {
      const auto [u, v] = cnls_exact_solution(x, t);
      CHECK(std::abs(std::abs(u) - 1.0 / std::cosh(x)) < 1e-14);
      (void)v;
    }
  }
}

TEST_CASE("exact solution satisfies the decoupled equations (finite differences)") {
  // i u_t + (1/2) u_xx + |u|^2 u = 0 checked with 8th-order stencils
  const double h = 0.02;
  const double c8[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const double c8_2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0,
                          -1.0 / 560.0};
  double max_resid = 0.0;
  auto ufun = [](double xx, double tt) { return cnls_exact_solution(xx, tt).first; };
  auto vfun = [](double xx, double tt) { return cnls_exact_solution(xx, tt).second; };
  std::vector<std::function<std::complex<double>(double, double)>> fields = {ufun, vfun};
  for (double x : {-1.3, 0.4, 2.0}) {
    for (double t : {0.5, 2.7}) {
      for (const auto& f : fields) {
        std::complex<double> ut = 0.0, uxx = c8_2[0] * f(x, t) / (h * h);
        for (int k = 1; k <= 4; ++k) {
          ut += c8[k - 1] * (f(x, t + k * h) - f(x, t - k * h)) / h;
          uxx += c8_2[k] * (f(x + k * h, t) + f(x - k * h, t)) / (h * h);
        }
        const std::complex<double> val = f(x, t);
        const std::complex<double> resid = kI * ut + 0.5 * uxx + std::norm(val) * val;
        max_resid = std::max(max_resid, std::abs(resid));
      }
    }
  }
  CHECK(max_resid <= 1e-10);
}

TEST_CASE("energy closed forms") {
  SUBCASE("single cosine mode") {
    const SpectralGrid1D grid(0.0, 2.0 * M_PI, 32);
    CnlsState st = CnlsState::zero(32);
    for (int j = 0; j < 32; ++j) st.u(j) = std::cos(grid.point(j));
    const VectorXd e = cnls_energy_density(st, grid, 0.0, 0.0);
    double total = 0.0;
    for (int j = 0; j < 32; ++j) {
      const double c = std::cos(grid.point(j)), s = std::sin(grid.point(j));
      const double expect = -0.25 * c * c * c * c - 0.25 * s * s + 0.25;
      CHECK(std::abs(e(j) - expect) <= 1e-12);
      total += expect;
    }
    CHECK(std::abs(cnls_energy(st, grid, 0.0, 0.0) - grid.spacing() * total) <= 1e-12);
  }
  SUBCASE("benchmark initial data: continuum values") {
    const SpectralGrid1D grid(-30.0, 60.0, 300);
    const CnlsState st = cnls_benchmark_state(grid);
    // -1/3 from the quartic terms, +1/20 from the carrier of the second field
    CHECK(std::abs(cnls_energy(st, grid, 0.0, 0.0) - (-17.0 / 60.0)) <= 1e-8);
    const CnlsInvariants inv = cnls_invariants(st, grid, 0.0, 0.0);
    CHECK(std::abs(inv.charge_u - 2.0 * std::tanh(30.0)) <= 1e-8);
    CHECK(std::abs(inv.charge_v - inv.charge_u) <= 1e-10);
    CHECK(std::abs(inv.momentum - (-1.0 / std::sqrt(10.0))) <= 1e-8);
  }
  SUBCASE("purely real data has zero momentum") {
    const SpectralGrid1D grid(-30.0, 60.0, 64);
    CnlsState st = CnlsState::zero(64);
    for (int j = 0; j < 64; ++j) st.u(j) = 1.0 / std::cosh(grid.point(j));
    const CnlsInvariants inv = cnls_invariants(st, grid, 0.0, 0.0);
    CHECK(std::abs(inv.momentum) <= 1e-14);
  }
}

TEST_CASE("zero state is a fixed point of every scheme") {
  CnlsParams p = benchmark_params(16, 0.1);
  p.grid = SpectralGrid1D(0.0, 2.0 * M_PI, 16);
  for (auto scheme : {CnlsIntegrator::Scheme::et4, CnlsIntegrator::Scheme::et4gl6,
                      CnlsIntegrator::Scheme::mst4}) {
    const CnlsIntegrator integrator(p, scheme);
    const CnlsStepResult r = integrator.step(CnlsState::zero(16));
    CHECK(r.state.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.state.v.cwiseAbs().maxCoeff() == 0.0);
    const CnlsInvariants inv = cnls_invariants(r.state, p.grid, p.alpha, p.beta);
    CHECK(inv.energy == 0.0);
    CHECK(inv.charge_u == 0.0);
    CHECK(inv.momentum == 0.0);
  }
}

TEST_CASE("one benchmark step: energy exact, residual at round-off, ~19 sweeps") {
  const CnlsParams p = benchmark_params();
  const CnlsIntegrator et4(p, CnlsIntegrator::Scheme::et4);
  const CnlsState st = cnls_benchmark_state(p.grid);
  const double e0 = cnls_energy(st, p.grid, 0.0, 0.0);

  const CnlsStepResult r = et4.step(st);
  const double e1 = cnls_energy(r.state, p.grid, 0.0, 0.0);
  CHECK(std::abs((e1 - e0) / e0) <= 1e-12);
  CHECK(r.iterations >= 14);
  CHECK(r.iterations <= 24);
  CHECK((r.stages.u[0] - st.u).cwiseAbs().maxCoeff() == 0.0);

  const VectorXd resid = cnls_ecl_residual(r.stages, p.grid, et4.tableau(), p.dt, 0, 0);
  CHECK(resid.cwiseAbs().maxCoeff() <= 1e-10);

  // corrupting one stage component must blow the identity up
  CnlsStages bad = r.stages;
  bad.u[1](77) += 1e-3;
  const VectorXd bad_resid = cnls_ecl_residual(bad, p.grid, et4.tableau(), p.dt, 0, 0);
  CHECK(bad_resid.cwiseAbs().maxCoeff() >= 1e-5);
}

TEST_CASE("residual evaluator agrees with the direct real-component sum") {
  CnlsParams p;
  p.alpha = 0.4;
  p.beta = 0.8;
  p.grid = SpectralGrid1D(-10.0, 20.0, 16);
  p.dt = 0.05;
  p.tol = 1e-14;
  p.max_iter = 200;
  const CnlsIntegrator et4(p, CnlsIntegrator::Scheme::et4);
  CnlsState st = CnlsState::zero(16);
  for (int j = 0; j < 16; ++j) {
    const double x = p.grid.point(j);
    st.u(j) = 0.8 / std::cosh(x) * std::exp(kI * (0.3 * x));
    st.v(j) = 0.6 / std::cosh(x - 1.0) * std::exp(kI * (-0.2 * x));
  }
  const CnlsStepResult r = et4.step(st);
  const VectorXd lib =
      cnls_ecl_residual(r.stages, p.grid, et4.tableau(), p.dt, p.alpha, p.beta);
  const VectorXd direct =
      direct_ecl_residual(r.stages, p.grid, et4.tableau(), p.dt, p.alpha, p.beta);
  CHECK((lib - direct).cwiseAbs().maxCoeff() <= 1e-12);
  // converged step satisfies the law even with advection and coupling on
  CHECK(lib.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("mst4: charges exact, energy error bounded, residual discriminates") {
  const CnlsParams p = benchmark_params();
  const CnlsIntegrator mst4(p, CnlsIntegrator::Scheme::mst4);
  CnlsState st = cnls_benchmark_state(p.grid);
  const CnlsInvariants ref = cnls_invariants(st, p.grid, 0.0, 0.0);
  double max_gce = 0.0, max_gee = 0.0, max_resid = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CnlsStepResult r = mst4.step(st);
    st = r.state;
    const CnlsInvariants inv = cnls_invariants(st, p.grid, 0.0, 0.0);
    max_gce = std::max({max_gce, std::abs(inv.charge_u - ref.charge_u) / ref.charge_u,
                        std::abs(inv.charge_v - ref.charge_v) / ref.charge_v});
    max_gee = std::max(max_gee, std::abs(inv.energy - ref.energy) / std::abs(ref.energy));
    max_resid = std::max(
        max_resid, cnls_ecl_residual(r.stages, p.grid, mst4.tableau(), p.dt, 0, 0)
                       .cwiseAbs()
                       .maxCoeff());
    CHECK(r.iterations >= 14);
    CHECK(r.iterations <= 24);
  }
  CHECK(max_gce <= 1e-12);
  CHECK(max_gee >= 1e-12);   // not exact
  CHECK(max_gee <= 1e-6);
  CHECK(max_resid >= 1e-6);  // the law does not hold for the symplectic step
}

TEST_CASE("gl6 variant is identical when the cubic terms are off") {
  CnlsParams p;
  p.alpha = 0.3;
  p.beta = 0.5;
  p.grid = SpectralGrid1D(-10.0, 20.0, 32);
  p.dt = 0.05;
  p.tol = 1e-14;
  p.max_iter = 200;
  p.nonlinearity_scale = 0.0;
  const CnlsIntegrator a(p, CnlsIntegrator::Scheme::et4);
  const CnlsIntegrator b(p, CnlsIntegrator::Scheme::et4gl6);
  CnlsState st = CnlsState::zero(32);
  for (int j = 0; j < 32; ++j) {
    const double x = p.grid.point(j);
    st.u(j) = std::exp(kI * (0.4 * x)) / std::cosh(x);
    st.v(j) = 0.5 * std::exp(kI * (-0.7 * x)) / std::cosh(x + 2.0);
  }
  const CnlsState ra = a.step(st).state;
  const CnlsState rb = b.step(st).state;
  CHECK((ra.u - rb.u).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((ra.v - rb.v).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("one step forward then one step backward returns the state") {
  CnlsParams p = benchmark_params(64, 0.4);
  p.grid = SpectralGrid1D(-30.0, 60.0, 64);
  const CnlsIntegrator fwd(p, CnlsIntegrator::Scheme::et4);
  CnlsParams pb = p;
  pb.dt = -p.dt;
  const CnlsIntegrator bwd(pb, CnlsIntegrator::Scheme::et4);
  const CnlsState st = cnls_benchmark_state(p.grid);
  const CnlsState there = fwd.step(st).state;
  const CnlsState back = bwd.step(there).state;
  CHECK((back.u - st.u).cwiseAbs().maxCoeff() <= 10.0 * p.tol);
  CHECK((back.v - st.v).cwiseAbs().maxCoeff() <= 10.0 * p.tol);
}

TEST_CASE("argument and convergence errors") {
  CnlsParams p = benchmark_params(16, 0.1);
  p.grid = SpectralGrid1D(0.0, 2.0 * M_PI, 16);
  p.tol = 1e-3;  // out of contract
  CHECK_THROWS_AS(CnlsIntegrator(p, CnlsIntegrator::Scheme::et4), std::invalid_argument);

  CnlsParams p2 = benchmark_params(16, 0.4);
  p2.grid = SpectralGrid1D(-30.0, 60.0, 16);
  p2.max_iter = 2;
  const CnlsIntegrator et4(p2, CnlsIntegrator::Scheme::et4);
  CnlsState st = CnlsState::zero(16);
  for (int j = 0; j < 16; ++j) st.u(j) = 1.0 / std::cosh(p2.grid.point(j));
  CHECK_THROWS_AS(et4.step(st), NonConvergenceError);

  const CnlsIntegrator ok(benchmark_params(32, 0.1), CnlsIntegrator::Scheme::et4);
  CHECK_THROWS_AS(ok.step(CnlsState::zero(16)), std::invalid_argument);

  CnlsStages incomplete;
  incomplete.u.resize(2, VectorXcd::Zero(32));
  incomplete.v.resize(2, VectorXcd::Zero(32));
  const CnlsParams p3 = benchmark_params(32, 0.1);
  const CnlsIntegrator et4b(p3, CnlsIntegrator::Scheme::et4);
  CHECK_THROWS_AS(cnls_ecl_residual(incomplete, p3.grid, et4b.tableau(), 0.1, 0, 0),
                  std::invalid_argument);
}
