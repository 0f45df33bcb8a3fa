#include "kst/bvp.hpp"

#include "kst/banded_lu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kst {

namespace {

// Unknowns are interleaved as (U_0, W_0, U_1, W_1, ...).
constexpr Eigen::Index kLower = 2;
constexpr Eigen::Index kUpper = 2;

void check_problem(const BvpProblem& p) {
  if (p.mesh_size < 3) throw std::invalid_argument("BvpProblem: mesh size must be >= 3");
  if (!(p.z_min < p.z_max)) throw std::invalid_argument("BvpProblem: need z_min < z_max");
  if (!p.rhs || !p.left || !p.right) throw std::invalid_argument("BvpProblem: rhs and both endpoint residuals required");
}

Eigen::VectorXd pack(const Eigen::VectorXd& U, const Eigen::VectorXd& W) {
  Eigen::VectorXd x(2 * U.size());
  for (Eigen::Index i = 0; i < U.size(); ++i) {
    x[2 * i] = U[i];
    x[2 * i + 1] = W[i];
  }
  return x;
}

Eigen::VectorXd residual_of(const BvpProblem& p, const Eigen::VectorXd& nodes, const Eigen::VectorXd& x) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd r(2 * n);
  const double h = p.step();
  std::array<double, 2> f_prev = p.rhs(nodes[0], x[0], x[1]);
  r[0] = p.left(x[0], x[1]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto f_next = p.rhs(nodes[i + 1], x[2 * i + 2], x[2 * i + 3]);
    r[1 + 2 * i] = (x[2 * i + 2] - x[2 * i]) / h - 0.5 * (f_prev[0] + f_next[0]);
    r[2 + 2 * i] = (x[2 * i + 3] - x[2 * i + 1]) / h - 0.5 * (f_prev[1] + f_next[1]);
    f_prev = f_next;
  }
  r[2 * n - 1] = p.right(x[2 * n - 2], x[2 * n - 1]);
  return r;
}

// Forward-difference Jacobian. Columns five apart touch disjoint rows, so each
// residual evaluation fills a whole colour class.
BandMatrix<double> jacobian_of(const BvpProblem& p, const Eigen::VectorXd& nodes, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& r0) {
  const Eigen::Index dim = x.size();
  BandMatrix<double> jac(dim, kLower, kUpper);
  constexpr Eigen::Index colours = kLower + kUpper + 1;
  Eigen::VectorXd steps(dim);
  for (Eigen::Index c = 0; c < dim; ++c) steps[c] = 1e-7 * (1.0 + std::abs(x[c]));

  for (Eigen::Index colour = 0; colour < colours; ++colour) {
    Eigen::VectorXd xp = x;
    for (Eigen::Index c = colour; c < dim; c += colours) xp[c] += steps[c];
    const Eigen::VectorXd rp = residual_of(p, nodes, xp);
    for (Eigen::Index c = colour; c < dim; c += colours) {
      const double dc = xp[c] - x[c];
      for (Eigen::Index row = std::max<Eigen::Index>(0, c - kUpper); row <= std::min(dim - 1, c + kLower); ++row)
        jac(row, c) = (rp[row] - r0[row]) / dc;
    }
  }
  return jac;
}

}  // namespace

Eigen::VectorXd BvpProblem::nodes() const {
  Eigen::VectorXd z(mesh_size);
  const double h = step();
  for (Eigen::Index i = 0; i < mesh_size; ++i) z[i] = z_min + h * static_cast<double>(i);
  z[mesh_size - 1] = z_max;
  return z;
}

Eigen::VectorXd collocation_residual(const BvpProblem& problem, const Eigen::VectorXd& nodes,
                                     const Eigen::VectorXd& U, const Eigen::VectorXd& W) {
  check_problem(problem);
  if (nodes.size() != problem.mesh_size || U.size() != problem.mesh_size || W.size() != problem.mesh_size)
    throw std::invalid_argument("collocation_residual: state size does not match the problem mesh");
  return residual_of(problem, nodes, pack(U, W));
}

BvpSolution newton_solve(const BvpProblem& problem, const NewtonOptions& options) {
  check_problem(problem);
  if (!(options.tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("newton_solve: max_iter must be >= 1");

  BvpSolution sol;
  sol.nodes = problem.nodes();
  const Eigen::Index n = problem.mesh_size;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  if (options.initial_guess) {
    const auto& g = *options.initial_guess;
    if (g.U.size() != n || g.W.size() != n) throw std::invalid_argument("newton_solve: initial guess mesh mismatch");
    x = pack(g.U, g.W);
  }

  auto& rep = sol.report;
  Eigen::VectorXd r = residual_of(problem, sol.nodes, x);
  double norm = r.lpNorm<Eigen::Infinity>();
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    rep.iterations = iter;
    rep.residual_history.push_back(norm);
    if (norm <= options.tol) {
      rep.converged = true;
      break;
    }
    const auto jac = jacobian_of(problem, sol.nodes, x, r);
    const Eigen::VectorXd step = band_solve<double>(jac, -r);

    // Full step; halve only while the residual grows.
    double lambda = 1.0;
    Eigen::VectorXd trial = x + step;
    Eigen::VectorXd r_trial = residual_of(problem, sol.nodes, trial);
    double trial_norm = r_trial.lpNorm<Eigen::Infinity>();
    for (int halvings = 0; !(trial_norm <= norm) && halvings < 10; ++halvings) {
      lambda *= 0.5;
      trial = x + lambda * step;
      r_trial = residual_of(problem, sol.nodes, trial);
      trial_norm = r_trial.lpNorm<Eigen::Infinity>();
    }
    x = std::move(trial);
    r = std::move(r_trial);
    norm = trial_norm;
  }
  if (!rep.converged && norm <= options.tol) {
    // Converged on the last permitted step.
    rep.residual_history.push_back(norm);
    rep.iterations = static_cast<int>(rep.residual_history.size());
    rep.converged = true;
  }
  rep.final_residual = norm;

  sol.U.resize(n);
  sol.W.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sol.U[i] = x[2 * i];
    sol.W[i] = x[2 * i + 1];
  }
  return sol;
}

double ode_residual(const BvpSolution& solution, const BvpProblem& problem) {
  check_problem(problem);
  if (solution.nodes.size() != problem.mesh_size ||
      std::abs(solution.nodes[0] - problem.z_min) > 1e-12 * (1.0 + std::abs(problem.z_min)) ||
      std::abs(solution.nodes[solution.nodes.size() - 1] - problem.z_max) > 1e-12 * (1.0 + std::abs(problem.z_max)))
    throw std::invalid_argument("ode_residual: solution mesh does not match the problem");
  return collocation_residual(problem, solution.nodes, solution.U, solution.W).lpNorm<Eigen::Infinity>();
}

double interpolate_U(const BvpSolution& solution, double z) {
  const auto& zs = solution.nodes;
  const Eigen::Index n = zs.size();
  if (n < 2) throw std::invalid_argument("interpolate_U: empty solution");
  const double lo = zs[0], hi = zs[n - 1];
  const double slack = 1e-12 * (1.0 + std::abs(hi - lo));
  if (z < lo - slack || z > hi + slack)
    throw std::domain_error("interpolate_U: z = " + std::to_string(z) + " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  z = std::clamp(z, lo, hi);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  auto i = static_cast<Eigen::Index>((z - lo) / h);
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const double w = (z - zs[i]) / (zs[i + 1] - zs[i]);
  return solution.U[i] + w * (solution.U[i + 1] - solution.U[i]);
}

}  // namespace kst
