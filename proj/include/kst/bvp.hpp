#pragma once

// Two-point boundary value problems U' = W, W' = rhs on a uniform mesh,
// trapezoidal collocation solved by Newton-Raphson.

#include <Eigen/Core>

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace kst {

struct BvpProblem {
  double z_min = 0.0;
  double z_max = 1.0;
  /// (z, U, W) -> (U', W')
  std::function<std::array<double, 2>(double, double, double)> rhs;
  /// Endpoint residuals in terms of (U, W) at z_min and z_max.
  std::function<double(double, double)> left;
  std::function<double(double, double)> right;
  Eigen::Index mesh_size = 101;

  double step() const { return (z_max - z_min) / static_cast<double>(mesh_size - 1); }
  Eigen::VectorXd nodes() const;
};

struct NewtonReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // residual inf-norm at the start of each iteration
  double final_residual = 0.0;
};

struct BvpSolution {
  Eigen::VectorXd nodes;
  Eigen::VectorXd U;
  Eigen::VectorXd W;
  NewtonReport report;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 20;
  std::optional<BvpSolution> initial_guess;
};

/// Discrete residual: both endpoint residuals followed, per interval, by
/// (U_{i+1}-U_i)/h - (U'_i+U'_{i+1})/2 and the same for W.
Eigen::VectorXd collocation_residual(const BvpProblem& problem, const Eigen::VectorXd& nodes,
                                     const Eigen::VectorXd& U, const Eigen::VectorXd& W);

/// Never throws on non-convergence; check report.converged. A singular Newton
/// matrix raises SingularMatrixError.
BvpSolution newton_solve(const BvpProblem& problem, const NewtonOptions& options = {});

/// Inf-norm of collocation_residual for a stored solution.
double ode_residual(const BvpSolution& solution, const BvpProblem& problem);

/// Linear interpolation of U on the solution mesh.
double interpolate_U(const BvpSolution& solution, double z);

}  // namespace kst
