#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace tiltsim {

enum class NlpStatus { Converged, MaxIterations, Infeasible, NumericFail };

/// Discrete time optimal control problem over a fixed horizon. Costs are given
/// in least squares residual form (the total cost is the sum of squared
/// residual entries), which is what the Gauss-Newton steps need. State bounds
/// are soft quadratic penalties, input bounds are hard.
struct NlpProblem {
  int horizon{0};
  int state_dim{0};
  int input_dim{0};
  Eigen::VectorXd x0;
  std::function<Eigen::VectorXd(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> dynamics;
  std::function<Eigen::VectorXd(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> stage_residual;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> terminal_residual;  // may be null
  Eigen::VectorXd u_lb, u_ub;
  Eigen::VectorXd x_lb, x_ub;          // entries may be +-inf; empty disables
  double state_penalty{1e3};           // weight on squared box violations
  Eigen::VectorXd u_guess;             // cold start input, zero when empty
};

struct NlpSolution {
  std::vector<Eigen::VectorXd> states;  // horizon + 1 entries
  std::vector<Eigen::VectorXd> inputs;  // horizon entries
  NlpStatus status{NlpStatus::Converged};
  double kkt_residual{0.0};
  double cost{0.0};
  double max_defect{0.0};
  int iterations{0};
};

struct SqpOptions {
  int max_iterations{60};
  double kkt_tol{1e-4};
  double fd_step{1e-6};
  double infeasibility_tol{1e-2};
};

/// Multiple shooting Gauss-Newton SQP. Each iteration linearizes dynamics and
/// residuals, condenses the shooting states out, and solves one box
/// constrained least squares subproblem of size horizon * input_dim. A warm
/// start is shifted forward by one stage.
NlpSolution solve_nlp(const NlpProblem& p, const NlpSolution* warm = nullptr,
                      const SqpOptions& opt = {});

}  // namespace tiltsim
