#include "lep/spectral_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace lep {

SpectralGrid1D::SpectralGrid1D(double x0, double length, int n)
    : x0_(x0), length_(length), n_(n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("SpectralGrid1D: n must be even and >= 4");
  if (!(length > 0.0))
    throw std::invalid_argument("SpectralGrid1D: length must be positive");
  dx_ = length_ / n_;
  points_.resize(n_);
  for (int j = 0; j < n_; ++j) points_[j] = x0_ + j * dx_;

  diff_ = Eigen::MatrixXd::Zero(n_, n_);
  const double scale = M_PI / length_;
  for (int j = 0; j < n_; ++j) {
    for (int k = j + 1; k < n_; ++k) {
      const double theta = M_PI * double(j - k) / double(n_);  // in (-pi, 0)
      const double cot = std::cos(theta) / std::sin(theta);
      const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      const double v = scale * sign * cot;
      diff_(j, k) = v;
      diff_(k, j) = -v;
    }
  }
}

Eigen::VectorXd SpectralGrid1D::apply_diff(const Eigen::VectorXd& field) const {
  if (field.size() != n_)
    throw std::invalid_argument("apply_diff: field length mismatch");
  return diff_ * field;
}

Eigen::VectorXcd SpectralGrid1D::apply_diff(const Eigen::VectorXcd& field) const {
  if (field.size() != n_)
    throw std::invalid_argument("apply_diff: field length mismatch");
  Eigen::VectorXcd out(n_);
  out.real() = diff_ * field.real();
  out.imag() = diff_ * field.imag();
  return out;
}

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Vec>
Vec apply_x_impl(const SpectralGrid1D& gx, const SpectralGrid1D& gy, const Vec& field) {
  const int n = gx.size(), m = gy.size();
  if (field.size() != Eigen::Index(n) * m)
    throw std::invalid_argument("apply_diff_x: field length mismatch");
  Vec out(field.size());
  // out(j,l) = sum_k Dx(j,k) f(k,l); columns of the row-major N x M view
  for (int l = 0; l < m; ++l) {
    typename Vec::PlainObject col(n);
    for (int j = 0; j < n; ++j) col(j) = field(j * m + l);
    col = gx.apply_diff(col);
    for (int j = 0; j < n; ++j) out(j * m + l) = col(j);
  }
  return out;
}

template <typename Vec>
Vec apply_y_impl(const SpectralGrid1D& gx, const SpectralGrid1D& gy, const Vec& field) {
  const int n = gx.size(), m = gy.size();
  if (field.size() != Eigen::Index(n) * m)
    throw std::invalid_argument("apply_diff_y: field length mismatch");
  Vec out(field.size());
  for (int j = 0; j < n; ++j)
    out.segment(j * m, m) = gy.apply_diff(Vec(field.segment(j * m, m)));
  return out;
}

}  // namespace

Eigen::VectorXd SpectralGrid2D::apply_diff_x(const Eigen::VectorXd& field) const {
  return apply_x_impl(gx_, gy_, field);
}
Eigen::VectorXd SpectralGrid2D::apply_diff_y(const Eigen::VectorXd& field) const {
  return apply_y_impl(gx_, gy_, field);
}
Eigen::VectorXcd SpectralGrid2D::apply_diff_x(const Eigen::VectorXcd& field) const {
  return apply_x_impl(gx_, gy_, field);
}
Eigen::VectorXcd SpectralGrid2D::apply_diff_y(const Eigen::VectorXcd& field) const {
  return apply_y_impl(gx_, gy_, field);
}

}  // namespace lep
