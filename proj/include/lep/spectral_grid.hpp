#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lep {

/// Periodic grid x_j = x0 + j*dx, j = 0..n-1, dx = length/n, together with
/// the skew-symmetric pseudospectral differentiation matrix
///   D_jk = (pi/L) (-1)^{j+k} cot(pi (x_j - x_k)/L),  j != k,  D_jj = 0.
/// Node differences are taken as (j-k)*dx by index so the mirrored fill
/// makes D + D^T exactly zero in floating point.
class SpectralGrid1D {
 public:
  SpectralGrid1D() = default;
  /// Requires even n >= 4 and length > 0 (invalid_argument otherwise).
  SpectralGrid1D(double x0, double length, int n);

  double x0() const { return x0_; }
  double length() const { return length_; }
  int size() const { return n_; }
  double spacing() const { return dx_; }
  double point(int j) const { return points_[j]; }
  const std::vector<double>& points() const { return points_; }
  const Eigen::MatrixXd& diff_matrix() const { return diff_; }

  Eigen::VectorXd apply_diff(const Eigen::VectorXd& field) const;
  Eigen::VectorXcd apply_diff(const Eigen::VectorXcd& field) const;

 private:
  double x0_ = 0.0, length_ = 0.0, dx_ = 0.0;
  int n_ = 0;
  std::vector<double> points_;
  Eigen::MatrixXd diff_;
};

/// Tensor grid for doubly periodic fields stored lexicographically with the
/// x index outermost: field[j*M + l] ~ z(x_j, y_l). The Kronecker operators
/// Dx (x) I and I (x) Dy are applied slice-wise; the NM x NM products are
/// never materialized.
class SpectralGrid2D {
 public:
  SpectralGrid2D() = default;
  SpectralGrid2D(SpectralGrid1D grid_x, SpectralGrid1D grid_y)
      : gx_(std::move(grid_x)), gy_(std::move(grid_y)) {}

  const SpectralGrid1D& x() const { return gx_; }
  const SpectralGrid1D& y() const { return gy_; }
  int size() const { return gx_.size() * gy_.size(); }
  int index(int j, int l) const { return j * gy_.size() + l; }

  Eigen::VectorXd apply_diff_x(const Eigen::VectorXd& field) const;
  Eigen::VectorXd apply_diff_y(const Eigen::VectorXd& field) const;
  Eigen::VectorXcd apply_diff_x(const Eigen::VectorXcd& field) const;
  Eigen::VectorXcd apply_diff_y(const Eigen::VectorXcd& field) const;

 private:
  SpectralGrid1D gx_, gy_;
};

}  // namespace lep
