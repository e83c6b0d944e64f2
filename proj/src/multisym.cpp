#include "lep/multisym.hpp"

#include <stdexcept>

namespace lep {

void validate(const MultiSymplecticSystem1D& system) {
  const int d = system.dim;
  if (d < 1) throw std::invalid_argument("multisym: dim must be positive");
  if (system.m_mat.rows() != d || system.m_mat.cols() != d ||
      system.k_mat.rows() != d || system.k_mat.cols() != d)
    throw std::invalid_argument("multisym: matrix size mismatch");
  const double scale_m = std::max(1.0, system.m_mat.cwiseAbs().maxCoeff());
  const double scale_k = std::max(1.0, system.k_mat.cwiseAbs().maxCoeff());
  if ((system.m_mat + system.m_mat.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale_m)
    throw std::invalid_argument("multisym: M must be skew-symmetric");
  if ((system.k_mat + system.k_mat.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale_k)
    throw std::invalid_argument("multisym: K must be skew-symmetric");
  if (!system.density || !system.grad)
    throw std::invalid_argument("multisym: density and gradient are required");
}

MultiSymplecticSystem1D nls_multisymplectic_system() {
  MultiSymplecticSystem1D sys;
  sys.dim = 4;
  sys.m_mat = Eigen::MatrixXd::Zero(4, 4);
  sys.m_mat(0, 1) = -1.0;
  sys.m_mat(1, 0) = 1.0;
  sys.k_mat = Eigen::MatrixXd::Zero(4, 4);
  sys.k_mat(0, 2) = 1.0;
  sys.k_mat(1, 3) = 1.0;
  sys.k_mat(2, 0) = -1.0;
  sys.k_mat(3, 1) = -1.0;
  sys.grad_linear = Eigen::MatrixXd::Zero(4, 4);
  sys.grad_linear(2, 2) = -2.0;
  sys.grad_linear(3, 3) = -2.0;
  sys.density = [](const Eigen::VectorXd& z, double) {
    const double q2 = z(0) * z(0) + z(1) * z(1);
    return -0.25 * q2 * q2 - (z(2) * z(2) + z(3) * z(3));
  };
  sys.grad = [](const Eigen::VectorXd& z, double) {
    const double q2 = z(0) * z(0) + z(1) * z(1);
    Eigen::VectorXd g(4);
    g(0) = -q2 * z(0);
    g(1) = -q2 * z(1);
    g(2) = -2.0 * z(2);
    g(3) = -2.0 * z(3);
    return g;
  };
  sys.nonlinearity_degree = 3;
  return sys;
}

MultiSymplecticSystem1D advected_oscillator_system(double speed, double omega) {
  MultiSymplecticSystem1D sys;
  sys.dim = 2;
  Eigen::MatrixXd j2(2, 2);
  j2 << 0.0, -1.0, 1.0, 0.0;
  sys.m_mat = j2;
  sys.k_mat = speed * j2;
  sys.grad_linear = omega * Eigen::MatrixXd::Identity(2, 2);
  sys.density = [omega](const Eigen::VectorXd& z, double) {
    return 0.5 * omega * (z(0) * z(0) + z(1) * z(1));
  };
  sys.grad = [omega](const Eigen::VectorXd& z, double) {
    return Eigen::VectorXd(omega * z);
  };
  sys.nonlinearity_degree = 1;
  return sys;
}

}  // namespace lep
