#pragma once

// Quadrature of the Poisson variational functional and its first variation.
//
//   Xi[u] = int int ( -u_x^2 - u_y^2 - 2 s f u - 2 u_xx u - 2 u_yy u ) dx dy
//
// with s = +1 as printed and s = -1 for the flipped source convention.
// Derivatives: central differences inside, second-order one-sided stencils on
// the boundary; trapezoidal weights.

#include "kst/poisson.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kst {

enum class SourceSign { AsPrinted, Flipped };

const char* to_string(SourceSign sign);

double variational_functional(const Field2D& u, SourceSign sign = SourceSign::AsPrinted,
                              const SourceFunction& f = poisson_source);

/// (Xi[u + h d] - Xi[u - h d]) / (2h)
double variational_first_variation(const Field2D& u, const Field2D& direction, double h,
                                   SourceSign sign = SourceSign::AsPrinted, const SourceFunction& f = poisson_source);

/// Trapezoidal sqrt(int int v^2).
double field_l2_norm(const Field2D& v);

/// Sum of sin(a pi x) sin(b pi y) modes, a, b <= max_mode, with normal random
/// weights. Vanishes on the boundary.
Field2D admissible_direction(Eigen::Index nx, Eigen::Index ny, std::uint64_t seed, int max_mode = 3);

/// Largest interior |Delta_h u - s f| with the 5-point Laplacian, s = +1 or -1.
double laplacian_residual(const Field2D& u, double sign, const SourceFunction& f = poisson_source);

struct VariationalFinding {
  std::vector<double> as_printed;  // |first variation| / ||direction|| per direction
  std::vector<double> flipped;
  double worst_as_printed = 0.0;
  double worst_flipped = 0.0;
  bool as_printed_stationary = false;
  bool flipped_stationary = false;

  /// "as-printed", "flipped", "both" or "neither".
  std::string consistent_convention() const;
};

/// Stationarity of u under both conventions over `count` random admissible
/// directions, judged at |first variation| <= tol * ||direction||.
VariationalFinding variational_sign_check(const Field2D& u, int count, std::uint64_t seed, double h = 1e-5,
                                          double tol = 1e-3);

}  // namespace kst
