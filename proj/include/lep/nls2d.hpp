#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lep/crk.hpp"
#include "lep/spectral_grid.hpp"

namespace lep {

/// 2D nonlinear Schroedinger equation with an external field,
///   i psi_t + alpha (psi_xx + psi_yy) + V'(|psi|^2, x, y) psi = 0,
/// where ' differentiates the potential V(xi, x, y) in its first argument.
/// V is polynomial in xi: the xi-linear coefficient may vary in space, the
/// higher powers have constant coefficients.
struct Nls2dProblem {
  double alpha = 0.5;
  std::function<double(double, double, double)> potential;        // V(xi, x, y)
  std::function<double(double, double, double)> potential_deriv;  // V'(xi, x, y)
  /// Degree of V in xi. The linear-in-xi coefficient V1 = V'(0, x, y) is
  /// treated implicitly by the solver; the remaining xi-polynomial part is
  /// iterated and must have space-independent coefficients.
  int potential_degree = 2;
  SpectralGrid2D grid;
  double dt = 0.05;
  double tol = 1e-14;
  int max_iter = 200;
};

struct Nls2dState {
  Eigen::VectorXcd psi;  // lexicographic, x index outermost

  static Nls2dState zero(int nm) { return {Eigen::VectorXcd::Zero(nm)}; }
};

struct Nls2dStages {
  std::vector<Eigen::VectorXcd> psi;  // values at abscissae 0..s
  int degree() const { return static_cast<int>(psi.size()) - 1; }
};

struct Nls2dStepResult {
  Nls2dState state;
  Nls2dStages stages;
  int iterations = 0;
};

struct Nls2dInvariants {
  double energy = 0.0;
  double charge = 0.0;
};

class Nls2dIntegrator {
 public:
  enum class Scheme {
    et2,  // average-vector-field time discretization (s = 1 continuous RK)
    st2,  // implicit midpoint time discretization
  };

  Nls2dIntegrator(Nls2dProblem problem, Scheme scheme);

  const Nls2dProblem& problem() const { return problem_; }
  Scheme scheme() const { return scheme_; }
  const CrkTableau& tableau() const { return tableau_; }

  Nls2dStepResult step(const Nls2dState& state) const;

 private:
  Eigen::VectorXcd apply_linear(const Eigen::VectorXcd& psi) const;
  Eigen::VectorXcd nonlinear(const Eigen::VectorXcd& psi) const;

  Nls2dProblem problem_;
  Scheme scheme_;
  CrkTableau tableau_;
  int quad_points_ = 0;
  Eigen::VectorXd v1_;          // V'(0, x, y) on the grid
  Eigen::VectorXd quad_nodes_, quad_weights_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;  // I - i (dt/2) H
};

/// Reduced energy density E_jl = (1/2) V(|psi|^2, x, y)
///   - (alpha/2)(v^2 + w^2 + a^2 + b^2)
/// with v + i w = Dx psi and a + i b = Dy psi; the global energy is
/// dx dy sum E_jl and is exactly conserved by the et2 scheme.
Eigen::VectorXd nls2d_energy_density(const Nls2dState& state, const Nls2dProblem& problem);

Nls2dInvariants nls2d_invariants(const Nls2dState& state, const Nls2dProblem& problem);

/// Residual field of the reduced discrete local energy conservation law,
///   R_jl = (E_jl^1 - E_jl^0)/dt + sum_k (Dx)_jk Fbar_jk,l
///        + sum_m (Dy)_lm Gbar_j,lm,
/// built from the stored stage polynomials only. Returns the full field;
/// use maxCoeff of the cwiseAbs for the scalar headline value.
Eigen::VectorXd nls2d_ecl_residual(const Nls2dStages& stages, const Nls2dProblem& problem,
                                   const CrkTableau& tableau, double dt);

/// Known closed-form benchmark solutions.
///   gp-attractive: sqrt(2) e^{-(x^2+y^2)/2} e^{-i t}
///   quintic:       A e^{-A^4 (x^2+y^2)/4} e^{-i A^4 t}, period 2 pi / A^4
std::complex<double> nls2d_exact_solution(const std::string& kind, double x, double y,
                                          double t, double amplitude = 1.5);

/// Problem factories for the benchmark potentials (grid/dt/tol supplied by
/// the caller afterwards or via the harness presets).
Nls2dProblem make_gp_problem(SpectralGrid2D grid, double beta,
                             std::function<double(double, double)> v1, double dt,
                             double tol = 1e-14, int max_iter = 200);
Nls2dProblem make_quintic_problem(SpectralGrid2D grid, double amplitude, double dt,
                                  double tol = 1e-14, int max_iter = 200);

Nls2dState nls2d_sample(const SpectralGrid2D& grid,
                        const std::function<std::complex<double>(double, double)>& f);

}  // namespace lep
