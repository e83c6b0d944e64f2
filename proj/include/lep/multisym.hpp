#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lep {

/// One-dimensional multi-symplectic system
///   M z_t + K z_x = grad_z S(z, x),  z in R^d,
/// with skew-symmetric M, K. The gradient splits as
///   grad S(z, x) = grad_linear * z + g(z, x);
/// solvers treat the linear part implicitly and iterate only on g.
struct MultiSymplecticSystem1D {
  int dim = 0;
  Eigen::MatrixXd m_mat;
  Eigen::MatrixXd k_mat;
  Eigen::MatrixXd grad_linear;
  std::function<double(const Eigen::VectorXd&, double)> density;       // S(z, x)
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> grad; // grad S
  int nonlinearity_degree = 1;
};

/// Throws invalid_argument unless M, K are skew-symmetric d x d.
void validate(const MultiSymplecticSystem1D& system);

/// Focusing cubic Schroedinger equation i u_t + (1/2) u_xx + |u|^2 u = 0 in
/// multi-symplectic form: z = (q1, q2, p1, p2), u = q1 + i q2, q_x = 2 p,
/// S = -(1/4)(q1^2 + q2^2)^2 - (p1^2 + p2^2).
MultiSymplecticSystem1D nls_multisymplectic_system();

/// Linear advected oscillator (z1 + i z2)_t + speed (.)_x = -i omega (.),
/// a degenerate multi-symplectic form with quadratic density
/// S = (omega/2)(z1^2 + z2^2). Exact solution e^{-i omega t} z0(x - speed t).
MultiSymplecticSystem1D advected_oscillator_system(double speed, double omega);

}  // namespace lep
