#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tiltsim {

enum class LsqStatus { Converged, NumericFail };
enum class BoundState { Free, AtLower, AtUpper };

/// Box constrained linear least squares: minimize 0.5 |A x - b|^2 over
/// lb <= x <= ub.
struct BoundedLsqProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

struct BoundedLsqOptions {
  double ridge{1e-8};    // min norm tie break for rank deficient systems
  double kkt_tol{1e-8};
  int max_changes{0};    // active set change cap, 10 * n when <= 0
  Eigen::VectorXd x0;    // warm start, empty for cold
};

struct BoundedLsqResult {
  Eigen::VectorXd x;
  double residual_norm{0.0};
  std::vector<BoundState> active;
  LsqStatus status{LsqStatus::Converged};
  int iterations{0};  // active set changes performed
};

/// Primal active set solver on the ridge regularized normal equations.
BoundedLsqResult solve_bounded_lsq(const BoundedLsqProblem& p,
                                   const BoundedLsqOptions& opt = {});

}  // namespace tiltsim
