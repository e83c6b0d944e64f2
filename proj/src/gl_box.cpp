#include "lep/gl_box.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lep/errors.hpp"
#include "lep/fixed_point.hpp"

namespace lep {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// <dt f>_i extraction from abscissa values of a degree-s polynomial with the
// continuous-RK structure f^tau = f^0 + dt sum_i L_i(tau) <dt f>_i.
VectorXd extract_time_average(const CrkTableau& tab, double dt,
                              const std::vector<VectorXd>& values, int i) {
  const int s = tab.stages();
  const MatrixXd& linv = tab.update_matrix_inverse();
  VectorXd acc = VectorXd::Zero(values[0].size());
  for (int a = 1; a <= s; ++a) acc += linv(i, a - 1) * (values[a] - values[0]);
  return VectorXd(acc / dt);
}

VectorXd weighted_value_average(const CrkTableau& tab,
                                const std::vector<VectorXd>& values, int i) {
  const MatrixXd& gamma = tab.average_weights();
  VectorXd acc = gamma(i, 0) * values[0];
  for (int a = 1; a < static_cast<int>(values.size()); ++a)
    acc += gamma(i, a) * values[a];
  return acc;
}

std::vector<VectorXd> column_history(const std::vector<Eigen::MatrixXd>& mats, int col) {
  std::vector<VectorXd> out;
  out.reserve(mats.size());
  for (const auto& m : mats) out.push_back(m.col(col));
  return out;
}

}  // namespace

GlSpaceTableau gauss_legendre_space_tableau(int r) {
  if (r < 1 || r > 2)
    throw std::invalid_argument(
        "gauss_legendre_space_tableau: only r in {1,2} is supported; higher-order "
        "collocation in space yields singular stage systems");
  const QuadratureRule rule = gauss_legendre_rule(r);
  GlSpaceTableau t;
  t.stages = r;
  t.a.resize(r, r);
  t.b.resize(r);
  t.c.resize(r);
  for (int j = 0; j < r; ++j) {
    t.c(j) = rule.nodes[j];
    t.b(j) = rule.weights[j];
    for (int k = 0; k < r; ++k)
      t.a(j, k) = Polynomial::lagrange_basis(rule.nodes, k).antiderivative()(rule.nodes[j]);
  }
  return t;
}

int GlBoxStepper::unknown_index(int slot, int n, int offset) const {
  const int d = system_.dim;
  const int r = space_tableau_.stages;
  const int block = d * (1 + 2 * r);
  return (slot * grid_.cells + n) * block + offset;
}

GlBoxStepper::GlBoxStepper(MultiSymplecticSystem1D system, GlBoxGrid grid, double dt,
                           CrkTableau time_tableau, GlSpaceTableau space_tableau,
                           double tol, int max_iter)
    : system_(std::move(system)),
      grid_(grid),
      dt_(dt),
      time_tableau_(std::move(time_tableau)),
      space_tableau_(std::move(space_tableau)),
      tol_(tol),
      max_iter_(max_iter) {
  validate(system_);
  if (space_tableau_.stages < 1 || space_tableau_.stages > 2)
    throw std::invalid_argument("GlBoxStepper: r in {1,2} required");
  if (grid_.cells < 2 || !(grid_.dx > 0.0))
    throw std::invalid_argument("GlBoxStepper: bad grid");
  if (!(tol_ > 0.0)) throw std::invalid_argument("GlBoxStepper: tol must be positive");
  if (system_.grad_linear.rows() != system_.dim ||
      system_.grad_linear.cols() != system_.dim)
    throw std::invalid_argument("GlBoxStepper: grad_linear size mismatch");

  const int s = time_tableau_.stages();
  const int m = std::max(system_.nonlinearity_degree, 1);
  quad_points_ = std::max(s, (m * s + s + 1) / 2);
  const QuadratureRule q = gauss_legendre_rule_unchecked(quad_points_);
  quad_nodes_ = Eigen::Map<const VectorXd>(q.nodes.data(), q.stages);
  quad_weights_ = Eigen::Map<const VectorXd>(q.weights.data(), q.stages);
  interp_.resize(quad_points_, s + 1);
  lag_at_q_.resize(s, quad_points_);
  for (int g = 0; g < quad_points_; ++g) {
    for (int c = 0; c <= s; ++c) interp_(g, c) = time_tableau_.value_basis()[c](q.nodes[g]);
    for (int i = 0; i < s; ++i) lag_at_q_(i, g) = time_tableau_.lagrange[i](q.nodes[g]);
  }

  assemble_matrix();
}

void GlBoxStepper::assemble_matrix() {
  const int d = system_.dim;
  const int r = space_tableau_.stages;
  const int s = time_tableau_.stages();
  const int ncells = grid_.cells;
  const int block = d * (1 + 2 * r);
  const int total = s * ncells * block;

  // Unknowns per (slot a-1, cell n): edge e_n^a | stages y_{n,j}^a | X_{n,j}^a.
  // Rows per (slot, cell): spatial stage relations (r d), edge chain (d),
  // averaged PDE with i = slot (r d).
  const MatrixXd& gamma = time_tableau_.average_weights();
  const MatrixXd& linv = time_tableau_.update_matrix_inverse();
  const MatrixXd& mm = system_.m_mat;
  const MatrixXd& qq = system_.grad_linear;
  const MatrixXd& kk = system_.k_mat;

  MatrixXd a = MatrixXd::Zero(total, total);
  auto row_base = [&](int slot, int n) { return (slot * ncells + n) * block; };

  for (int slot = 0; slot < s; ++slot) {
    for (int n = 0; n < ncells; ++n) {
      const int rb = row_base(slot, n);
      // spatial stage relations: y_{n,j} - e_n - dx sum_k a_jk X_{n,k} = 0
      for (int j = 0; j < r; ++j) {
        const int rr = rb + j * d;
        for (int p = 0; p < d; ++p) {
          a(rr + p, unknown_index(slot, n, d + j * d + p)) += 1.0;
          a(rr + p, unknown_index(slot, n, p)) -= 1.0;
          for (int k = 0; k < r; ++k)
            a(rr + p, unknown_index(slot, n, d * (1 + r) + k * d + p)) -=
                grid_.dx * space_tableau_.a(j, k);
        }
      }
      // edge chain: e_{n+1} - e_n - dx sum_j b_j X_{n,j} = 0
      {
        const int rr = rb + r * d;
        const int np = (n + 1) % ncells;
        for (int p = 0; p < d; ++p) {
          a(rr + p, unknown_index(slot, np, p)) += 1.0;
          a(rr + p, unknown_index(slot, n, p)) -= 1.0;
          for (int j = 0; j < r; ++j)
            a(rr + p, unknown_index(slot, n, d * (1 + r) + j * d + p)) -=
                grid_.dx * space_tableau_.b(j);
        }
      }
      // averaged PDE for i = slot, per stage j, scaled by dt to keep the
      // row magnitudes near the spatial rows':
      //   sum_a linv(i,a-1) M (y^a - y^0) + dt (K <X>_i - Q <y>_i) = dt <g>_i
      for (int j = 0; j < r; ++j) {
        const int rr = rb + r * d + d + j * d;
        for (int slot2 = 0; slot2 < s; ++slot2) {
          const double lw = linv(slot, slot2);
          const double gw = dt_ * gamma(slot, slot2 + 1);
          for (int p = 0; p < d; ++p)
            for (int pp = 0; pp < d; ++pp) {
              const int ycol = unknown_index(slot2, n, d + j * d + pp);
              const int xcol = unknown_index(slot2, n, d * (1 + r) + j * d + pp);
              a(rr + p, ycol) += lw * mm(p, pp) - gw * qq(p, pp);
              a(rr + p, xcol) += gw * kk(p, pp);
            }
        }
      }
    }
  }

  matrix_ = std::move(a);
  lu_.compute(matrix_);
  // probe the factorization: the box stage system can be singular for
  // resonant dt/dx combinations
  VectorXd probe = VectorXd::LinSpaced(total, 0.3, 1.1);
  const VectorXd sol = lu_.solve(probe);
  const double resid = (matrix_ * sol - probe).cwiseAbs().maxCoeff();
  if (!(resid < 1e-8 * std::max(1.0, probe.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("GlBoxStepper: stage system is numerically singular");
}

GlBoxStepResult GlBoxStepper::step(const GlBoxState& state) const {
  const int d = system_.dim;
  const int r = space_tableau_.stages;
  const int s = time_tableau_.stages();
  const int ncells = grid_.cells;
  const int block = d * (1 + 2 * r);
  const int total = s * ncells * block;

  if (state.edges.rows() != d || state.edges.cols() != ncells ||
      static_cast<int>(state.stages.size()) != r ||
      static_cast<int>(state.dx_stages.size()) != r)
    throw std::invalid_argument("GlBoxStepper::step: state shape mismatch");

  const MatrixXd& gamma = time_tableau_.average_weights();
  const MatrixXd& linv = time_tableau_.update_matrix_inverse();

  // iterate values at abscissae 1..s; start from the constant predictor
  GlBoxSlab slab;
  slab.edges.assign(s + 1, state.edges);
  slab.stages.assign(s + 1, state.stages);
  slab.dx_stages.assign(s + 1, state.dx_stages);

  // constant part of the (dt-scaled) PDE rows' right-hand side
  VectorXd rhs0 = VectorXd::Zero(total);
  for (int slot = 0; slot < s; ++slot) {
    double lw_sum = 0.0;
    for (int slot2 = 0; slot2 < s; ++slot2) lw_sum += linv(slot, slot2);
    for (int n = 0; n < ncells; ++n) {
      const int rb = (slot * ncells + n) * block + r * d + d;
      for (int j = 0; j < r; ++j) {
        const VectorXd y0 = state.stages[j].col(n);
        const VectorXd x0 = state.dx_stages[j].col(n);
        VectorXd val = lw_sum * (system_.m_mat * y0);
        val -= dt_ * gamma(slot, 0) * (system_.k_mat * x0);
        val += dt_ * gamma(slot, 0) * (system_.grad_linear * y0);
        rhs0.segment(rb + j * d, d) += val;
      }
    }
  }

  // flat iterate; sweeps apply defect correction so the increment size
  // tracks the true equation residual and can reach exact zero
  VectorXd unknowns(total);
  for (int slot = 0; slot < s; ++slot)
    for (int n = 0; n < ncells; ++n) {
      for (int p = 0; p < d; ++p)
        unknowns(unknown_index(slot, n, p)) = state.edges(p, n);
      for (int j = 0; j < r; ++j)
        for (int p = 0; p < d; ++p) {
          unknowns(unknown_index(slot, n, d + j * d + p)) = state.stages[j](p, n);
          unknowns(unknown_index(slot, n, d * (1 + r) + j * d + p)) =
              state.dx_stages[j](p, n);
        }
    }

  VectorXd rhs(total);
  SweepMonitor monitor(tol_, max_iter_, "gl_box");
  for (;;) {
    rhs = rhs0;
    // lagged nonlinear remainder dt <g>_i per cell and stage
    for (int n = 0; n < ncells; ++n) {
      for (int j = 0; j < r; ++j) {
        const double x = stage_point(n, j);
        std::vector<VectorXd> gq(quad_points_);
        for (int g = 0; g < quad_points_; ++g) {
          VectorXd y = interp_(g, 0) * slab.stages[0][j].col(n);
          for (int c = 1; c <= s; ++c) y += interp_(g, c) * slab.stages[c][j].col(n);
          gq[g] = system_.grad(y, x) - system_.grad_linear * y;
        }
        for (int slot = 0; slot < s; ++slot) {
          VectorXd avg = VectorXd::Zero(d);
          for (int g = 0; g < quad_points_; ++g)
            avg += quad_weights_(g) * lag_at_q_(slot, g) * gq[g];
          avg *= dt_ / time_tableau_.rule.weights[slot];
          rhs.segment((slot * ncells + n) * block + r * d + d + j * d, d) += avg;
        }
      }
    }

    const VectorXd defect = rhs - matrix_ * unknowns;
    const VectorXd delta = lu_.solve(defect);
    unknowns += delta;
    const double change = delta.cwiseAbs().maxCoeff();

    for (int slot = 0; slot < s; ++slot) {
      const int a = slot + 1;
      for (int n = 0; n < ncells; ++n) {
        for (int p = 0; p < d; ++p)
          slab.edges[a](p, n) = unknowns(unknown_index(slot, n, p));
        for (int j = 0; j < r; ++j)
          for (int p = 0; p < d; ++p) {
            slab.stages[a][j](p, n) = unknowns(unknown_index(slot, n, d + j * d + p));
            slab.dx_stages[a][j](p, n) =
                unknowns(unknown_index(slot, n, d * (1 + r) + j * d + p));
          }
      }
    }

    if (monitor.done(change, unknowns.cwiseAbs().maxCoeff())) break;
  }
  const int iterations = monitor.iterations();

  GlBoxStepResult out;
  out.slab = std::move(slab);
  out.next.edges = out.slab.edges[s];
  out.next.stages = out.slab.stages[s];
  out.next.dx_stages = out.slab.dx_stages[s];
  out.iterations = iterations;
  out.ecl_residual =
      gl_ecl_residual(out.slab, system_, grid_, time_tableau_, space_tableau_, dt_);
  return out;
}

GlBoxState gl_initial_data(const MultiSymplecticSystem1D& system, const GlBoxGrid& grid,
                           const GlSpaceTableau& space_tableau,
                           const std::function<Eigen::VectorXd(double)>& profile,
                           const std::function<Eigen::VectorXd(double)>& profile_dx) {
  const int d = system.dim;
  const int r = space_tableau.stages;
  const int ncells = grid.cells;

  GlBoxState st;
  st.edges.resize(d, ncells);
  for (int n = 0; n < ncells; ++n) st.edges.col(n) = profile(grid.x0 + n * grid.dx);
  st.stages.assign(r, MatrixXd::Zero(d, ncells));
  st.dx_stages.assign(r, MatrixXd::Zero(d, ncells));

  // Per cell: min ||X - X_hint||^2 + ||(e_n + dx A X) - y_hint||^2 subject
  // to dx B X = e_{n+1} - e_n, with A = a (x) I, B = b^T (x) I. KKT system
  // of size rd + d; for r = 1 the constraint already pins X.
  MatrixXd amat = MatrixXd::Zero(r * d, r * d);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k)
      amat.block(j * d, k * d, d, d) =
          grid.dx * space_tableau.a(j, k) * MatrixXd::Identity(d, d);
  MatrixXd bmat = MatrixXd::Zero(d, r * d);
  for (int j = 0; j < r; ++j)
    bmat.block(0, j * d, d, d) = grid.dx * space_tableau.b(j) * MatrixXd::Identity(d, d);

  MatrixXd kkt = MatrixXd::Zero(r * d + d, r * d + d);
  kkt.topLeftCorner(r * d, r * d) =
      MatrixXd::Identity(r * d, r * d) + amat.transpose() * amat;
  kkt.topRightCorner(r * d, d) = bmat.transpose();
  kkt.bottomLeftCorner(d, r * d) = bmat;
  const Eigen::PartialPivLU<MatrixXd> kkt_lu(kkt);

  for (int n = 0; n < ncells; ++n) {
    VectorXd xhint(r * d), yrel(r * d);
    for (int j = 0; j < r; ++j) {
      const double xs = grid.x0 + (n + space_tableau.c(j)) * grid.dx;
      xhint.segment(j * d, d) = profile_dx(xs);
      yrel.segment(j * d, d) = profile(xs) - st.edges.col(n);
    }
    const VectorXd diff = st.edges.col((n + 1) % ncells) - st.edges.col(n);
    VectorXd rhs(r * d + d);
    rhs.head(r * d) = xhint + amat.transpose() * yrel;
    rhs.tail(d) = diff;
    const VectorXd sol = kkt_lu.solve(rhs);
    const VectorXd xsol = sol.head(r * d);
    const VectorXd ysol = amat * xsol;
    for (int j = 0; j < r; ++j) {
      st.dx_stages[j].col(n) = xsol.segment(j * d, d);
      st.stages[j].col(n) = st.edges.col(n) + ysol.segment(j * d, d);
    }
  }
  return st;
}

double gl_global_energy(const MultiSymplecticSystem1D& system, const GlBoxGrid& grid,
                        const GlSpaceTableau& space_tableau,
                        const std::vector<Eigen::MatrixXd>& stages,
                        const std::vector<Eigen::MatrixXd>& dx_stages) {
  double total = 0.0;
  for (int n = 0; n < grid.cells; ++n)
    for (int j = 0; j < space_tableau.stages; ++j) {
      const VectorXd z = stages[j].col(n);
      const VectorXd zx = dx_stages[j].col(n);
      const double x = grid.x0 + (n + space_tableau.c(j)) * grid.dx;
      total += space_tableau.b(j) *
               (system.density(z, x) - 0.5 * z.dot(system.k_mat * zx));
    }
  return grid.dx * total;
}

Eigen::VectorXd gl_edge_fluxes(const GlBoxSlab& slab, const CrkTableau& time_tableau,
                               const MultiSymplecticSystem1D& system, double dt) {
  const int s = time_tableau.stages();
  const int ncells = static_cast<int>(slab.edges[0].cols());
  VectorXd fluxes = VectorXd::Zero(ncells);
  for (int n = 0; n < ncells; ++n) {
    const auto hist = column_history(slab.edges, n);
    double acc = 0.0;
    for (int i = 0; i < s; ++i) {
      const VectorXd zi = weighted_value_average(time_tableau, hist, i);
      const VectorXd ti = extract_time_average(time_tableau, dt, hist, i);
      acc += time_tableau.rule.weights[i] * zi.dot(system.k_mat * ti);
    }
    fluxes(n) = 0.5 * acc;
  }
  return fluxes;
}

Eigen::VectorXd gl_ecl_residual(const GlBoxSlab& slab, const MultiSymplecticSystem1D& system,
                                const GlBoxGrid& grid, const CrkTableau& time_tableau,
                                const GlSpaceTableau& space_tableau, double dt) {
  const int s = time_tableau.stages();
  const int r = space_tableau.stages;
  const int ncells = grid.cells;
  if (static_cast<int>(slab.edges.size()) != s + 1)
    throw std::invalid_argument("gl_ecl_residual: slab/tableau degree mismatch");

  const VectorXd fluxes = gl_edge_fluxes(slab, time_tableau, system, dt);

  VectorXd resid(ncells);
  for (int n = 0; n < ncells; ++n) {
    double energy_diff = 0.0;
    for (int j = 0; j < r; ++j) {
      const double x = grid.x0 + (n + space_tableau.c(j)) * grid.dx;
      const VectorXd z0 = slab.stages[0][j].col(n);
      const VectorXd z1 = slab.stages[s][j].col(n);
      const VectorXd x0 = slab.dx_stages[0][j].col(n);
      const VectorXd x1 = slab.dx_stages[s][j].col(n);
      const double e0 = system.density(z0, x) - 0.5 * z0.dot(system.k_mat * x0);
      const double e1 = system.density(z1, x) - 0.5 * z1.dot(system.k_mat * x1);
      energy_diff += space_tableau.b(j) * (e1 - e0);
    }
    resid(n) = grid.dx * energy_diff + dt * (fluxes((n + 1) % ncells) - fluxes(n));
  }
  return resid;
}

double gl_commutation_defect(const GlBoxSlab& slab, const CrkTableau& time_tableau,
                             const GlSpaceTableau& space_tableau, const GlBoxGrid& grid,
                             double dt) {
  const int s = time_tableau.stages();
  const int r = space_tableau.stages;
  const int ncells = static_cast<int>(slab.edges[0].cols());
  const int d = static_cast<int>(slab.edges[0].rows());
  const Eigen::PartialPivLU<MatrixXd> a_lu(space_tableau.a);

  double defect = 0.0;
  for (int n = 0; n < ncells; ++n) {
    const auto edge_hist = column_history(slab.edges, n);
    for (int i = 0; i < s; ++i) {
      const VectorXd te = extract_time_average(time_tableau, dt, edge_hist, i);
      // <dt dx z>_i: time extraction of the stored spatial derivatives
      // <dx dt z>_i: invert the collocation relations on <dt y>_i - <dt e>_i
      MatrixXd rhs(r, d);
      std::vector<VectorXd> tdx(r);
      for (int j = 0; j < r; ++j) {
        std::vector<VectorXd> yh(s + 1), xh(s + 1);
        for (int a = 0; a <= s; ++a) {
          yh[a] = slab.stages[a][j].col(n);
          xh[a] = slab.dx_stages[a][j].col(n);
        }
        tdx[j] = extract_time_average(time_tableau, dt, xh, i);
        rhs.row(j) =
            ((extract_time_average(time_tableau, dt, yh, i) - te) / grid.dx).transpose();
      }
      const MatrixXd w = a_lu.solve(rhs);  // rows: <dx dt z>_{n,j}
      for (int j = 0; j < r; ++j)
        defect = std::max(defect, (w.row(j).transpose() - tdx[j]).cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

}  // namespace lep
