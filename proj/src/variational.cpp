#include "kst/variational.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace kst {

namespace {

// Derivative along x1 (axis 0) or x2 (axis 1) at node (i, j).
double first_diff(const Field2D& u, Eigen::Index i, Eigen::Index j, int axis) {
  const Eigen::Index n = axis == 0 ? u.nx() : u.ny();
  const Eigen::Index k = axis == 0 ? i : j;
  const double h = axis == 0 ? u.hx() : u.hy();
  auto at = [&](Eigen::Index t) { return axis == 0 ? u(t, j) : u(i, t); };
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

double second_diff(const Field2D& u, Eigen::Index i, Eigen::Index j, int axis) {
  const Eigen::Index n = axis == 0 ? u.nx() : u.ny();
  const Eigen::Index k = axis == 0 ? i : j;
  const double h = axis == 0 ? u.hx() : u.hy();
  auto at = [&](Eigen::Index t) { return axis == 0 ? u(t, j) : u(i, t); };
  if (k == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
  if (k == n - 1) return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
  return (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h);
}

double trapezoid_weight(const Field2D& u, Eigen::Index i, Eigen::Index j) {
  const double wx = (i == 0 || i == u.nx() - 1) ? 0.5 : 1.0;
  const double wy = (j == 0 || j == u.ny() - 1) ? 0.5 : 1.0;
  return wx * wy * u.hx() * u.hy();
}

void require_stencil(const Field2D& u) {
  if (u.nx() < 4 || u.ny() < 4) throw std::invalid_argument("variational functional needs at least 4x4 nodes");
}

}  // namespace

const char* to_string(SourceSign sign) { return sign == SourceSign::AsPrinted ? "as-printed" : "flipped"; }

double variational_functional(const Field2D& u, SourceSign sign, const SourceFunction& f) {
  require_stencil(u);
  const double s = sign == SourceSign::AsPrinted ? 1.0 : -1.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.ny(); ++j) {
    for (Eigen::Index i = 0; i < u.nx(); ++i) {
      const double v = u(i, j);
      const double ux = first_diff(u, i, j, 0), uy = first_diff(u, i, j, 1);
      const double uxx = second_diff(u, i, j, 0), uyy = second_diff(u, i, j, 1);
      const double integrand =
          -ux * ux - uy * uy - 2.0 * s * f(u.x1(i), u.x2(j)) * v - 2.0 * uxx * v - 2.0 * uyy * v;
      total += trapezoid_weight(u, i, j) * integrand;
    }
  }
  return total;
}

double variational_first_variation(const Field2D& u, const Field2D& direction, double h, SourceSign sign,
                                   const SourceFunction& f) {
  if (!u.same_mesh(direction)) throw std::invalid_argument("first variation: field and direction meshes differ");
  if (!(h > 0.0)) throw std::invalid_argument("first variation: h must be positive");
  Field2D plus = u, minus = u;
  plus.values() += h * direction.values();
  minus.values() -= h * direction.values();
  return (variational_functional(plus, sign, f) - variational_functional(minus, sign, f)) / (2.0 * h);
}

double field_l2_norm(const Field2D& v) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.ny(); ++j)
    for (Eigen::Index i = 0; i < v.nx(); ++i) acc += trapezoid_weight(v, i, j) * v(i, j) * v(i, j);
  return std::sqrt(acc);
}

Field2D admissible_direction(Eigen::Index nx, Eigen::Index ny, std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> w(static_cast<std::size_t>(max_mode * max_mode));
  for (auto& c : w) c = normal(rng);
  return sample_field(nx, ny, [&](double x, double y) {
    double acc = 0.0;
    for (int a = 1; a <= max_mode; ++a)
      for (int b = 1; b <= max_mode; ++b)
        acc += w[static_cast<std::size_t>((a - 1) * max_mode + (b - 1))] * std::sin(a * std::numbers::pi * x) *
               std::sin(b * std::numbers::pi * y);
    return acc;
  });
}

double laplacian_residual(const Field2D& u, double sign, const SourceFunction& f) {
  double worst = 0.0;
  const double hx = u.hx(), hy = u.hy();
  for (Eigen::Index j = 1; j + 1 < u.ny(); ++j) {
    for (Eigen::Index i = 1; i + 1 < u.nx(); ++i) {
      const double lap = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / (hx * hx) +
                         (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (hy * hy);
      worst = std::max(worst, std::abs(lap - sign * f(u.x1(i), u.x2(j))));
    }
  }
  return worst;
}

std::string VariationalFinding::consistent_convention() const {
  if (as_printed_stationary && flipped_stationary) return "both";
  if (as_printed_stationary) return "as-printed";
  if (flipped_stationary) return "flipped";
  return "neither";
}

VariationalFinding variational_sign_check(const Field2D& u, int count, std::uint64_t seed, double h, double tol) {
  VariationalFinding finding;
  for (int t = 0; t < count; ++t) {
    const Field2D dir = admissible_direction(u.nx(), u.ny(), seed + static_cast<std::uint64_t>(t));
    const double norm = field_l2_norm(dir);
    finding.as_printed.push_back(std::abs(variational_first_variation(u, dir, h, SourceSign::AsPrinted)) / norm);
    finding.flipped.push_back(std::abs(variational_first_variation(u, dir, h, SourceSign::Flipped)) / norm);
  }
  for (double v : finding.as_printed) finding.worst_as_printed = std::max(finding.worst_as_printed, v);
  for (double v : finding.flipped) finding.worst_flipped = std::max(finding.worst_flipped, v);
  finding.as_printed_stationary = count > 0 && finding.worst_as_printed <= tol;
  finding.flipped_stationary = count > 0 && finding.worst_flipped <= tol;
  return finding;
}

}  // namespace kst
