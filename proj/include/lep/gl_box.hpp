#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lep/crk.hpp"
#include "lep/multisym.hpp"

namespace lep {

/// Butcher tableau of the r-stage Gauss-Legendre collocation method used in
/// space. Satisfies the symplecticity identity
/// b_j b_k - b_j a_jk - b_k a_kj = 0.
struct GlSpaceTableau {
  int stages = 0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b, c;
};

/// Space tableau for r in {1, 2}; higher r is refused (the box stage
/// systems become singular and massive).
GlSpaceTableau gauss_legendre_space_tableau(int r);

/// Uniform periodic cell layout x_n = x0 + n*dx, n = 0..cells-1, with the
/// closure x_cells == x_0 + length.
struct GlBoxGrid {
  double x0 = 0.0;
  double dx = 0.0;
  int cells = 0;
};

/// Data carried between steps: edge values z_n, internal stage values
/// z_{n,j} and their spatial derivatives, all at one time level. The stage
/// and derivative columns must satisfy the spatial collocation relations
///   z_{n,j} = z_n + dx sum_k a_jk dxz_{n,k},
///   z_{n+1} = z_n + dx sum_j b_j dxz_{n,j}  (periodic)
/// exactly; gl_initial_data builds such data from samples.
struct GlBoxState {
  Eigen::MatrixXd edges;                   // d x N
  std::vector<Eigen::MatrixXd> stages;     // r entries, d x N
  std::vector<Eigen::MatrixXd> dx_stages;  // r entries, d x N
};

/// Full time-slab of one step: edge/stage/derivative polynomials stored by
/// their values at the uniform abscissae 0..s.
struct GlBoxSlab {
  std::vector<Eigen::MatrixXd> edges;                    // s+1 of d x N
  std::vector<std::vector<Eigen::MatrixXd>> stages;      // s+1 of r of d x N
  std::vector<std::vector<Eigen::MatrixXd>> dx_stages;   // s+1 of r of d x N
};

struct GlBoxStepResult {
  GlBoxState next;
  GlBoxSlab slab;
  Eigen::VectorXd ecl_residual;  // per cell, from gl_ecl_residual
  int iterations = 0;
};

/// Box scheme coupling Gauss-Legendre collocation in space with the
/// energy-preserving continuous RK method in time. One global linear system
/// couples all cells, stages and abscissae; its constant part is factored
/// once, and each fixed-point sweep re-solves with the lagged nonlinear
/// gradient remainder (Jacobi over the whole ring, order-independent).
class GlBoxStepper {
 public:
  /// The factored linear core depends on dt, dx and the tableaux, so the
  /// step size is fixed at construction. Throws invalid_argument when the
  /// assembled stage system is numerically singular.
  GlBoxStepper(MultiSymplecticSystem1D system, GlBoxGrid grid, double dt,
               CrkTableau time_tableau, GlSpaceTableau space_tableau, double tol,
               int max_iter);

  GlBoxStepResult step(const GlBoxState& state) const;

  const GlBoxGrid& grid() const { return grid_; }
  double dt() const { return dt_; }
  const CrkTableau& time_tableau() const { return time_tableau_; }
  const GlSpaceTableau& space_tableau() const { return space_tableau_; }
  const MultiSymplecticSystem1D& system() const { return system_; }

  double stage_point(int n, int j) const {
    return grid_.x0 + (n + space_tableau_.c(j)) * grid_.dx;
  }

 private:
  int unknown_index(int slot, int n, int offset) const;
  void assemble_matrix();

  MultiSymplecticSystem1D system_;
  GlBoxGrid grid_;
  double dt_;
  CrkTableau time_tableau_;
  GlSpaceTableau space_tableau_;
  double tol_;
  int max_iter_;
  int quad_points_ = 0;
  Eigen::VectorXd quad_nodes_, quad_weights_;
  Eigen::MatrixXd interp_;     // value_basis_c(sigma_g)
  Eigen::MatrixXd lag_at_q_;   // l_i(sigma_g)
  Eigen::MatrixXd matrix_;     // assembled linear core, kept for defect correction
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Consistent initial data from profile samples: edges from z(x_n), stage
/// values/derivatives from a per-cell constrained least squares that matches
/// the analytic samples while satisfying the spatial collocation relations
/// exactly (for r = 1 the relations determine the data uniquely).
GlBoxState gl_initial_data(const MultiSymplecticSystem1D& system, const GlBoxGrid& grid,
                           const GlSpaceTableau& space_tableau,
                           const std::function<Eigen::VectorXd(double)>& profile,
                           const std::function<Eigen::VectorXd(double)>& profile_dx);

/// Weighted energy of one time level, dx sum_n sum_j b_j E_nj with
/// E_nj = S(z_nj, x_nj) - (1/2) z_nj^T K dxz_nj.
double gl_global_energy(const MultiSymplecticSystem1D& system, const GlBoxGrid& grid,
                        const GlSpaceTableau& space_tableau,
                        const std::vector<Eigen::MatrixXd>& stages,
                        const std::vector<Eigen::MatrixXd>& dx_stages);

/// Per-cell residual of the discrete local energy conservation law
///   dx sum_j b_j (E_nj^1 - E_nj^0) + dt (Fbar_{n+1} - Fbar_n),
/// evaluated from the slab alone.
Eigen::VectorXd gl_ecl_residual(const GlBoxSlab& slab, const MultiSymplecticSystem1D& system,
                                const GlBoxGrid& grid, const CrkTableau& time_tableau,
                                const GlSpaceTableau& space_tableau, double dt);

/// Edge fluxes Fbar_n (one per edge) whose differences enter the residual;
/// summing the differences around the ring telescopes to zero.
Eigen::VectorXd gl_edge_fluxes(const GlBoxSlab& slab, const CrkTableau& time_tableau,
                               const MultiSymplecticSystem1D& system, double dt);

/// Largest commutation defect |<dx dt z>_i - <dt dx z>_i| over all cells,
/// stages and averages: the discrete commutability behind the conservation
/// proof, recomputed from the slab.
double gl_commutation_defect(const GlBoxSlab& slab, const CrkTableau& time_tableau,
                             const GlSpaceTableau& space_tableau, const GlBoxGrid& grid,
                             double dt);

}  // namespace lep
