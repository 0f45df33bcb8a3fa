#pragma once

// Zero-order reduction of the 2-D Poisson problem to one ODE per fixed x2.

#include "kst/bvp.hpp"
#include "kst/inner.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kst {

using SourceFunction = std::function<double(double, double)>;

/// sin(pi x1) sin(pi x2)
double poisson_source(double x1, double x2);

/// sin(pi x1) sin(pi x2) / (-2 pi^2)
double analytic_solution(double x1, double x2);

class SingularJacobianError : public std::runtime_error {
 public:
  SingularJacobianError(double z, double x1)
      : std::runtime_error("psi' vanishes at x1 = " + std::to_string(x1) + " (z = " + std::to_string(z) + ")"),
        z_(z), x1_(x1) {}
  double z() const { return z_; }
  double x1() const { return x1_; }

 private:
  double z_, x1_;
};

class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(double z)
      : std::runtime_error("leading coefficient c2 vanishes at z = " + std::to_string(z)), z_(z) {}
  double z() const { return z_; }

 private:
  double z_;
};

class DegenerateBoundaryError : public std::runtime_error {
 public:
  DegenerateBoundaryError(const std::string& side, double bracket)
      : std::runtime_error(side + " boundary bracket " + std::to_string(bracket) + " is zero; condition is vacuous"),
        bracket_(bracket) {}
  double bracket() const { return bracket_; }

 private:
  double bracket_;
};

struct SliceProblem {
  double x2_tilde = 0.0;
  double z_min = 0.0;
  double z_max = 1.0;
  KstParams params;
  std::shared_ptr<const PsiTable> table;
  SourceFunction rhs = poisson_source;
};

/// (alpha_2 psi(x2), alpha_1 + alpha_2 psi(x2))
std::pair<double, double> slice_bounds(double x2_tilde, const KstParams& params, const PsiTable& table);

SliceProblem make_slice(double x2_tilde, const KstParams& params, std::shared_ptr<const PsiTable> table,
                        SourceFunction rhs = poisson_source);

/// psi^-1((z - alpha_2 psi(x2)) / alpha_1)
double x1_of_z(double z, double x2_tilde, const KstParams& params, const PsiTable& table);

/// dx1/dz = 1 / (alpha_1 psi'(x1(z)))
double jacobian_factor(double z, double x2_tilde, const KstParams& params, const PsiTable& table);

struct CoefficientValues {
  double x1 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  double g = 0.0;
};

/// c2 U'' + c1 U' + c0 U - g = 0 with all psi terms taken at x1(z) and x2.
class OdeCoefficients {
 public:
  explicit OdeCoefficients(SliceProblem slice);

  CoefficientValues at(double z) const;
  double c2(double z) const { return at(z).c2; }
  double c1(double z) const { return at(z).c1; }
  double c0(double z) const { return at(z).c0; }
  double g(double z) const { return at(z).g; }

  const SliceProblem& slice() const { return slice_; }

 private:
  SliceProblem slice_;
  double a1_, a2_;
  double d1_x2_, d2_x2_;  // psi'(x2), psi''(x2)
};

OdeCoefficients ode_coefficients(const SliceProblem& slice);

/// U' = W, W' = (g - c1 W - c0 U) / c2.
class FirstOrderSystem {
 public:
  explicit FirstOrderSystem(OdeCoefficients coeffs) : coeffs_(std::move(coeffs)) {}

  std::array<double, 2> operator()(double z, double U, double W) const;

  /// Throws SingularSystemError at the first node where c2 vanishes.
  void check_mesh(const Eigen::VectorXd& nodes) const;

  const OdeCoefficients& coefficients() const { return coeffs_; }

 private:
  OdeCoefficients coeffs_;
};

FirstOrderSystem first_order_system(const OdeCoefficients& coeffs);

/// bracket * U(endpoint) = 0 at each end of the slice.
struct BoundaryConditions {
  double bracket_left = 0.0;
  double bracket_right = 0.0;

  double left(double U, double /*W*/) const { return bracket_left * U; }
  double right(double U, double /*W*/) const { return bracket_right * U; }
};

/// Throws DegenerateBoundaryError when a bracket is within 1e-12 of zero.
BoundaryConditions boundary_conditions(const SliceProblem& slice);

BvpProblem slice_bvp(const SliceProblem& slice, Eigen::Index mesh_size);

struct SliceSolution {
  SliceProblem slice;
  BoundaryConditions bc;
  BvpSolution solution;
};

SliceSolution solve_slice(const SliceProblem& slice, Eigen::Index mesh_size, const NewtonOptions& options = {});

/// Uniform node values on the unit square; (i, j) is (x1_i, x2_j).
class Field2D {
 public:
  Field2D(Eigen::Index nx, Eigen::Index ny);

  Eigen::Index nx() const { return values_.rows(); }
  Eigen::Index ny() const { return values_.cols(); }
  double hx() const { return 1.0 / static_cast<double>(nx() - 1); }
  double hy() const { return 1.0 / static_cast<double>(ny() - 1); }
  double x1(Eigen::Index i) const { return i == nx() - 1 ? 1.0 : static_cast<double>(i) * hx(); }
  double x2(Eigen::Index j) const { return j == ny() - 1 ? 1.0 : static_cast<double>(j) * hy(); }
  bool is_boundary(Eigen::Index i, Eigen::Index j) const {
    return i == 0 || j == 0 || i == nx() - 1 || j == ny() - 1;
  }
  bool same_mesh(const Field2D& other) const { return nx() == other.nx() && ny() == other.ny(); }

  double& operator()(Eigen::Index i, Eigen::Index j) { return values_(i, j); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  Eigen::MatrixXd& values() { return values_; }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Samples f on the field mesh.
Field2D sample_field(Eigen::Index nx, Eigen::Index ny, const std::function<double(double, double)>& f);

class MissingSliceError : public std::runtime_error {
 public:
  explicit MissingSliceError(double x2) : std::runtime_error("no solved slice for x2 = " + std::to_string(x2)) {}
};

/// u(x1, x2) = U_{x2}(z(x1, x2)) from the slice whose x2 matches each row.
Field2D reconstruct_field(std::span<const SliceSolution> slices, Eigen::Index nx, Eigen::Index ny);

/// Solution of U'' = g / c2 with U = 0 at both ends, by Gauss-Legendre
/// quadrature of the Green's-function integral. Exact reduced solution when
/// c1 and c0 vanish (identity inner function).
Eigen::VectorXd reduced_reference(const SliceProblem& slice, const Eigen::VectorXd& nodes);

/// u*(x1(z), x2) at each node.
Eigen::VectorXd analytic_restriction(const SliceProblem& slice, const Eigen::VectorXd& nodes);

struct SliceReport {
  double x2_tilde = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  double linf_analytic = 0.0;
  double l2_analytic = 0.0;
  double linf_reduced = 0.0;
  double l2_reduced = 0.0;
  double amplitude_ratio = 0.0;  // extremum of U over extremum of u*, 0 when u* vanishes
  double z_extremum_numeric = 0.0;
  double z_extremum_analytic = 0.0;
  int interior_extrema_numeric = 0;
  int interior_extrema_analytic = 0;
  double max_abs_c1 = 0.0;  // size of the terms reduced_reference drops
  double max_abs_c0 = 0.0;
};

SliceReport compare_slice(const BvpSolution& solution, const SliceProblem& slice);

/// Number of strict interior local extrema, ignoring steps below
/// `noise` times the sequence's largest magnitude.
int count_interior_extrema(const Eigen::VectorXd& v, double noise = 1e-12);

/// Integral of g(x1(z)) dx1/dz over the slice, composite 3-point Gauss-Legendre.
double transfer_integral(const std::function<double(double)>& g, const SliceProblem& slice, int panels);

}  // namespace kst
