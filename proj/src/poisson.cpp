#include "kst/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kst {

namespace {

constexpr double kPi = std::numbers::pi;

// 3-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 3> kGaussNodes{-0.7745966692414833770, 0.0, 0.7745966692414833770};
constexpr std::array<double, 3> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

void require_plane(const KstParams& params) {
  if (params.n != 2) throw std::invalid_argument("Poisson reduction needs n = 2, got n = " + std::to_string(params.n));
}

double bound_slack(double z_min, double z_max) { return 1e-12 * (1.0 + std::abs(z_min) + std::abs(z_max)); }

Real x1_real(double z, double x2_tilde, const KstParams& params, const PsiTable& table) {
  require_plane(params);
  const auto [z_min, z_max] = slice_bounds(x2_tilde, params, table);
  const double slack = bound_slack(z_min, z_max);
  if (z < z_min - slack || z > z_max + slack)
    throw std::domain_error("x1_of_z: z = " + std::to_string(z) + " outside slice [" + std::to_string(z_min) + ", " +
                            std::to_string(z_max) + "]");
  const Real y = (Real(z) - Real(params.alpha_at(2)) * psi_eval(table, Real(x2_tilde))) / Real(params.alpha_at(1));
  return psi_inverse(table, std::clamp(y, Real(0), Real(1)));
}

double d(const PsiTable& table, int order, const Real& x) { return to_double(psi_derivative(table, order, x)); }

}  // namespace

double poisson_source(double x1, double x2) { return std::sin(kPi * x1) * std::sin(kPi * x2); }

double analytic_solution(double x1, double x2) { return poisson_source(x1, x2) / (-2.0 * kPi * kPi); }

std::pair<double, double> slice_bounds(double x2_tilde, const KstParams& params, const PsiTable& table) {
  require_plane(params);
  if (!(x2_tilde >= 0.0 && x2_tilde <= 1.0))
    throw std::domain_error("slice_bounds: x2 = " + std::to_string(x2_tilde) + " outside [0, 1]");
  const double shift = params.alpha_at(2) * to_double(psi_eval(table, Real(x2_tilde)));
  return {shift, params.alpha_at(1) + shift};
}

SliceProblem make_slice(double x2_tilde, const KstParams& params, std::shared_ptr<const PsiTable> table,
                        SourceFunction rhs) {
  if (!table) throw std::invalid_argument("make_slice: missing psi table");
  const auto [z_min, z_max] = slice_bounds(x2_tilde, params, *table);
  return SliceProblem{x2_tilde, z_min, z_max, params, std::move(table), std::move(rhs)};
}

double x1_of_z(double z, double x2_tilde, const KstParams& params, const PsiTable& table) {
  return to_double(x1_real(z, x2_tilde, params, table));
}

double jacobian_factor(double z, double x2_tilde, const KstParams& params, const PsiTable& table) {
  const Real x1 = x1_real(z, x2_tilde, params, table);
  const double slope = d(table, 1, x1);
  if (slope == 0.0) throw SingularJacobianError(z, to_double(x1));
  return 1.0 / (params.alpha_at(1) * slope);
}

OdeCoefficients::OdeCoefficients(SliceProblem slice) : slice_(std::move(slice)) {
  require_plane(slice_.params);
  if (!slice_.table) throw std::invalid_argument("OdeCoefficients: missing psi table");
  a1_ = slice_.params.alpha_at(1);
  a2_ = slice_.params.alpha_at(2);
  const Real x2(slice_.x2_tilde);
  d1_x2_ = d(*slice_.table, 1, x2);
  d2_x2_ = d(*slice_.table, 2, x2);
}

CoefficientValues OdeCoefficients::at(double z) const {
  const auto& table = *slice_.table;
  const Real x1 = x1_real(z, slice_.x2_tilde, slice_.params, table);
  const double p0 = to_double(psi_eval(table, x1));
  const double d1 = d(table, 1, x1);
  const double d2 = d(table, 2, x1);
  const double d3 = d(table, 3, x1);
  if (d1 == 0.0) throw SingularJacobianError(z, to_double(x1));

  const double a1 = a1_, a2 = a2_;
  const double e1 = d1_x2_, e2 = d2_x2_;
  const double lead = a1 * a1 * d1 * d1 + a2 * a2 * e1 * e1;

  CoefficientValues c;
  c.x1 = to_double(x1);
  c.c2 = lead / (a1 * d1);
  c.c1 = (a1 * a1 * d1 * d1 * d2 - a2 * a2 * e1 * e1 * d2) / (a1 * a1 * std::pow(d1, 3));
  c.c0 = (a1 * a2 * d1 * d1 * d2 * e2 + a2 * a2 * e1 * e1 * (3.0 * d2 - p0 * d3)) / (std::pow(a1, 3) * std::pow(d1, 5));
  c.g = slice_.rhs(c.x1, slice_.x2_tilde) / (a1 * d1);
  return c;
}

OdeCoefficients ode_coefficients(const SliceProblem& slice) { return OdeCoefficients(slice); }

std::array<double, 2> FirstOrderSystem::operator()(double z, double U, double W) const {
  const auto c = coeffs_.at(z);
  if (c.c2 == 0.0) throw SingularSystemError(z);
  return {W, (c.g - c.c1 * W - c.c0 * U) / c.c2};
}

void FirstOrderSystem::check_mesh(const Eigen::VectorXd& nodes) const {
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    if (coeffs_.at(nodes[i]).c2 == 0.0) throw SingularSystemError(nodes[i]);
}

FirstOrderSystem first_order_system(const OdeCoefficients& coeffs) { return FirstOrderSystem(coeffs); }

BoundaryConditions boundary_conditions(const SliceProblem& slice) {
  require_plane(slice.params);
  const auto& table = *slice.table;
  const double a1 = slice.params.alpha_at(1), a2 = slice.params.alpha_at(2);
  const Real x2(slice.x2_tilde);
  const double e1 = d(table, 1, x2), e2 = d(table, 2, x2);

  auto bracket = [&](double x1) {
    const double b1 = d(table, 1, Real(x1)), b2 = d(table, 2, Real(x1));
    return (a2 * a2 * e1 * e1 * b2 + a1 * a2 * b1 * b1 * e2) / (a1 * a1 * std::pow(b1, 3)) + a1 * b1 +
           a2 * a2 * e1 * e1 / (a1 * b1);
  };
  BoundaryConditions bc{bracket(0.0), bracket(1.0)};
  if (!(std::abs(bc.bracket_left) > 1e-12)) throw DegenerateBoundaryError("left", bc.bracket_left);
  if (!(std::abs(bc.bracket_right) > 1e-12)) throw DegenerateBoundaryError("right", bc.bracket_right);
  return bc;
}

BvpProblem slice_bvp(const SliceProblem& slice, Eigen::Index mesh_size) {
  const auto bc = boundary_conditions(slice);
  const auto system = first_order_system(ode_coefficients(slice));
  BvpProblem problem;
  problem.z_min = slice.z_min;
  problem.z_max = slice.z_max;
  problem.mesh_size = mesh_size;
  problem.rhs = system;
  problem.left = [bc](double U, double W) { return bc.left(U, W); };
  problem.right = [bc](double U, double W) { return bc.right(U, W); };
  system.check_mesh(problem.nodes());
  return problem;
}

SliceSolution solve_slice(const SliceProblem& slice, Eigen::Index mesh_size, const NewtonOptions& options) {
  const auto problem = slice_bvp(slice, mesh_size);
  return SliceSolution{slice, boundary_conditions(slice), newton_solve(problem, options)};
}

Field2D::Field2D(Eigen::Index nx, Eigen::Index ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("Field2D: need at least 2 nodes per direction");
  values_ = Eigen::MatrixXd::Zero(nx, ny);
}

Field2D sample_field(Eigen::Index nx, Eigen::Index ny, const std::function<double(double, double)>& f) {
  Field2D field(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) field(i, j) = f(field.x1(i), field.x2(j));
  return field;
}

Field2D reconstruct_field(std::span<const SliceSolution> slices, Eigen::Index nx, Eigen::Index ny) {
  Field2D field(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j) {
    const double x2 = field.x2(j);
    auto it = std::find_if(slices.begin(), slices.end(),
                           [x2](const SliceSolution& s) { return std::abs(s.slice.x2_tilde - x2) <= 1e-9; });
    if (it == slices.end()) throw MissingSliceError(x2);
    const auto& s = *it;
    for (Eigen::Index i = 0; i < nx; ++i) {
      const std::array<double, 2> x{field.x1(i), s.slice.x2_tilde};
      const double z = to_double(z_map(s.slice.params, *s.slice.table, std::span<const double>(x)));
      field(i, j) = interpolate_U(s.solution, z);
    }
  }
  return field;
}

Eigen::VectorXd reduced_reference(const SliceProblem& slice, const Eigen::VectorXd& nodes) {
  const OdeCoefficients coeffs(slice);
  const Eigen::Index n = nodes.size();
  const double a = nodes[0], b = nodes[n - 1], length = b - a;
  // Cumulative integrals of r and s*r, r = g / c2.
  Eigen::VectorXd i0 = Eigen::VectorXd::Zero(n), i1 = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]), half = 0.5 * (nodes[i + 1] - nodes[i]);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double s = mid + half * kGaussNodes[q];
      const auto c = coeffs.at(s);
      const double r = c.g / c.c2;
      s0 += kGaussWeights[q] * r;
      s1 += kGaussWeights[q] * s * r;
    }
    i0[i + 1] = i0[i] + half * s0;
    i1[i + 1] = i1[i] + half * s1;
  }
  const double total = b * i0[n - 1] - i1[n - 1];
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = nodes[i] * i0[i] - i1[i] - (nodes[i] - a) / length * total;
  return u;
}

Eigen::VectorXd analytic_restriction(const SliceProblem& slice, const Eigen::VectorXd& nodes) {
  Eigen::VectorXd u(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    u[i] = analytic_solution(x1_of_z(nodes[i], slice.x2_tilde, slice.params, *slice.table), slice.x2_tilde);
  return u;
}

int count_interior_extrema(const Eigen::VectorXd& v, double noise) {
  if (v.size() < 3) return 0;
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  int count = 0, last_sign = 0;
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    const double step = v[i + 1] - v[i];
    if (std::abs(step) <= noise * scale) continue;
    const int sign = step > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

namespace {

double trapezoid_l2(const Eigen::VectorXd& nodes, const Eigen::VectorXd& e) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < nodes.size(); ++i)
    acc += 0.5 * (nodes[i + 1] - nodes[i]) * (e[i] * e[i] + e[i + 1] * e[i + 1]);
  return std::sqrt(acc);
}

Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return idx;
}

}  // namespace

SliceReport compare_slice(const BvpSolution& solution, const SliceProblem& slice) {
  const auto& z = solution.nodes;
  const Eigen::VectorXd ua = analytic_restriction(slice, z);
  const Eigen::VectorXd ur = reduced_reference(slice, z);
  const Eigen::VectorXd ea = solution.U - ua, er = solution.U - ur;

  SliceReport rep;
  rep.x2_tilde = slice.x2_tilde;
  rep.z_min = slice.z_min;
  rep.z_max = slice.z_max;
  rep.linf_analytic = ea.lpNorm<Eigen::Infinity>();
  rep.l2_analytic = trapezoid_l2(z, ea);
  rep.linf_reduced = er.lpNorm<Eigen::Infinity>();
  rep.l2_reduced = trapezoid_l2(z, er);

  const Eigen::Index iu = argmax_abs(solution.U), ia = argmax_abs(ua);
  rep.z_extremum_numeric = z[iu];
  rep.z_extremum_analytic = z[ia];
  rep.amplitude_ratio = ua[ia] != 0.0 ? solution.U[iu] / ua[ia] : 0.0;
  rep.interior_extrema_numeric = count_interior_extrema(solution.U);
  rep.interior_extrema_analytic = count_interior_extrema(ua);

  const OdeCoefficients coeffs(slice);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const auto c = coeffs.at(z[i]);
    rep.max_abs_c1 = std::max(rep.max_abs_c1, std::abs(c.c1));
    rep.max_abs_c0 = std::max(rep.max_abs_c0, std::abs(c.c0));
  }
  return rep;
}

double transfer_integral(const std::function<double(double)>& g, const SliceProblem& slice, int panels) {
  if (panels < 1) throw std::invalid_argument("transfer_integral: panels must be >= 1");
  const double h = (slice.z_max - slice.z_min) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = slice.z_min + (p + 0.5) * h;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double z = mid + 0.5 * h * kGaussNodes[q];
      const double x1 = x1_of_z(z, slice.x2_tilde, slice.params, *slice.table);
      total += 0.5 * h * kGaussWeights[q] * g(x1) * jacobian_factor(z, slice.x2_tilde, slice.params, *slice.table);
    }
  }
  return total;
}

}  // namespace kst
