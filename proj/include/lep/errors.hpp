#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lep {

/// Thrown when a fixed-point stage solve fails to reach its tolerance
/// within the iteration budget. Carries the last iterate (flattened) and
/// the last successive-sweep max-norm change so callers can inspect or
/// report partial progress.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, int iterations,
                      double last_change, Eigen::VectorXd last_iterate = {})
      : std::runtime_error(what),
        iterations(iterations),
        last_change(last_change),
        last_iterate(std::move(last_iterate)) {}

  int iterations;
  double last_change;
  Eigen::VectorXd last_iterate;
};

}  // namespace lep
