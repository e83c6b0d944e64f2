#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "lep/crk.hpp"
#include "lep/spectral_grid.hpp"

namespace lep {

/// Coupled nonlinear Schroedinger pair
///   i u_t + i alpha u_x + (1/2) u_xx + (|u|^2 + beta |v|^2) u = 0
///   i v_t - i alpha v_x + (1/2) v_xx + (beta |u|^2 + |v|^2) v = 0
/// on a periodic pseudospectral grid. Real components are u = q1 + i q2,
/// v = q3 + i q4 with the auxiliary variables p_i = (1/2) D q_i never kept
/// as independent unknowns.
struct CnlsParams {
  double alpha = 0.0;
  double beta = 0.0;
  SpectralGrid1D grid;
  double dt = 0.1;
  double tol = 1e-14;
  int max_iter = 200;
  /// Scales the cubic terms; 0 turns the coupling off (quadrature-exactness
  /// checks and linear-problem comparisons).
  double nonlinearity_scale = 1.0;
};

struct CnlsState {
  Eigen::VectorXcd u, v;

  Eigen::VectorXd q1() const { return u.real(); }
  Eigen::VectorXd q2() const { return u.imag(); }
  Eigen::VectorXd q3() const { return v.real(); }
  Eigen::VectorXd q4() const { return v.imag(); }

  static CnlsState zero(int n) {
    return {Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
  }
};

/// Stage value polynomials of one step, stored at the uniform abscissae
/// 0, 1/s, ..., 1 (entry 0 is the step's initial state).
struct CnlsStages {
  std::vector<Eigen::VectorXcd> u, v;
  int degree() const { return static_cast<int>(u.size()) - 1; }
};

struct CnlsStepResult {
  CnlsState state;
  CnlsStages stages;
  int iterations = 0;
};

struct CnlsInvariants {
  double energy = 0.0;
  double charge_u = 0.0;
  double charge_v = 0.0;
  double momentum = 0.0;
};

/// Per-step conservation snapshot; relative errors are taken against the
/// step-0 values (zero at step 0 by definition). When a reference value
/// vanishes the corresponding error falls back to the absolute difference
/// and `absolute_fallback` is set.
struct ConservationRecord {
  double time = 0.0;
  double energy = 0.0, charge_u = 0.0, charge_v = 0.0, momentum = 0.0;
  double gee = 0.0, gce_u = 0.0, gce_v = 0.0, gie = 0.0;
  double max_ecl_residual = 0.0;
  int iterations = 0;
  bool absolute_fallback = false;
};

class CnlsIntegrator {
 public:
  enum class Scheme {
    et4,     // 2-stage Gauss continuous RK in time, exact integrals
    et4gl6,  // same, nonlinear integrals by the 3-point Gauss formula
    mst4,    // 2-stage Gauss symplectic RK in time
  };

  CnlsIntegrator(CnlsParams params, Scheme scheme);

  const CnlsParams& params() const { return params_; }
  Scheme scheme() const { return scheme_; }
  const CrkTableau& tableau() const { return tableau_; }

  /// Advance one step of size params.dt (use a negated dt in params to step
  /// backwards). Throws NonConvergenceError if the sweep limit is hit.
  CnlsStepResult step(const CnlsState& state) const;

 private:
  CnlsStepResult step_crk(const CnlsState& state) const;
  CnlsStepResult step_gauss_irk(const CnlsState& state) const;

  CnlsParams params_;
  Scheme scheme_;
  CrkTableau tableau_;
  int quad_points_ = 0;
  Eigen::MatrixXcd lin_u_, lin_v_;  // -alpha D + (i/2) D^2 and +alpha D + ...
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_u_, lu_v_;
  Eigen::MatrixXd irk_a_;           // space for mst4 tableau
  Eigen::VectorXd irk_c_, irk_d_;   // d = b^T a^{-1}
  Eigen::MatrixXd quad_aw_;         // A(tau_a, sigma_g) * w_g
  Eigen::MatrixXd quad_interp_;     // lt_c(sigma_g)
};

/// Pointwise energy density E_j and global energy E = dx * sum_j E_j for
/// the pseudospectral semi-discretization (p_i = (1/2) D q_i throughout).
Eigen::VectorXd cnls_energy_density(const CnlsState& state, const SpectralGrid1D& grid,
                                    double alpha, double beta,
                                    double nonlinearity_scale = 1.0);
double cnls_energy(const CnlsState& state, const SpectralGrid1D& grid, double alpha,
                   double beta, double nonlinearity_scale = 1.0);

/// Global momentum I and charges (CH_U, CH_V).
CnlsInvariants cnls_invariants(const CnlsState& state, const SpectralGrid1D& grid,
                               double alpha, double beta,
                               double nonlinearity_scale = 1.0);

/// Residual field of the discrete local energy conservation law
///   (E_j^1 - E_j^0)/dt + sum_k D_jk Fbar_jk
/// evaluated from the stored stage polynomials alone (weighted averages and
/// the tableau's update-matrix inverse; independent of the solver path).
/// Throws invalid_argument when stage data is missing/inconsistent.
Eigen::VectorXd cnls_ecl_residual(const CnlsStages& stages, const SpectralGrid1D& grid,
                                  const CrkTableau& tableau, double dt, double alpha,
                                  double beta, double nonlinearity_scale = 1.0);

/// Exact solution of the decoupled benchmark (alpha = beta = 0):
///   u = sech(x) e^{i t/2},  v = sech(x - t/sqrt(10)) e^{i(x/sqrt(10) + 9t/20)}.
std::pair<std::complex<double>, std::complex<double>> cnls_exact_solution(double x,
                                                                          double t);

/// Samples of the benchmark initial condition on the grid.
CnlsState cnls_benchmark_state(const SpectralGrid1D& grid, double t = 0.0);

/// Soliton-train initial data: component amplitudes 2a_j/(1+beta), widths
/// sqrt(2 a_j), phase velocities gamma_j -/+ alpha, centers x_j.
struct SolitonComponent {
  double amplitude;  // a_j
  double velocity;   // gamma_j
  double center;     // x_j
};
CnlsState cnls_soliton_train_state(const SpectralGrid1D& grid, double alpha, double beta,
                                   const std::vector<SolitonComponent>& train);

}  // namespace lep
