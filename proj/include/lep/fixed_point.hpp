#pragma once

#include <limits>
#include <string>

#include "lep/errors.hpp"

namespace lep {

/// Convergence bookkeeping shared by the stage solvers. A sweep is
/// converged when its max-norm change reaches the requested tolerance, or
/// when the change stagnates at the round-off floor of the defect
/// evaluation (a few hundred ulps of the iterate scale) without reaching
/// it. After convergence a few polishing sweeps run until the change stops
/// decreasing, pushing the stage residual to the floor.
class SweepMonitor {
 public:
  SweepMonitor(double tol, int max_iter, std::string label)
      : tol_(tol), max_iter_(max_iter), label_(std::move(label)) {}

  /// Call once per sweep with the max-norm change and the iterate scale;
  /// returns true when the loop should stop. Throws NonConvergenceError
  /// when the sweep budget runs out before convergence.
  bool done(double change, double scale) {
    ++sweep_;
    const double floor =
        256.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
    if (converged_at_ < 0 &&
        (change <= tol_ ||
         (sweep_ >= 3 && change <= floor && change >= 0.5 * prev_)))
      converged_at_ = sweep_;
    if (converged_at_ >= 0 &&
        (change == 0.0 || change >= prev_ || sweep_ >= converged_at_ + 8))
      return true;
    if (sweep_ >= max_iter_) {
      if (converged_at_ >= 0) return true;
      throw NonConvergenceError(label_ + ": stage iteration stalled", sweep_, change);
    }
    prev_ = change;
    return false;
  }

  int iterations() const { return converged_at_; }

 private:
  double tol_;
  int max_iter_;
  std::string label_;
  int sweep_ = 0;
  int converged_at_ = -1;
  double prev_ = std::numeric_limits<double>::infinity();
};

}  // namespace lep
