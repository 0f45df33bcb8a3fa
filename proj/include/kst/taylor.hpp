#pragma once

// Taylor expansion of the superposition in the shift parameter a.

#include "kst/inner.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace kst {

/// Outer functions Phi_q, q = 0..count-1, with derivatives up to max_order.
struct OuterFunctionSet {
  int count = 0;
  int max_order = 0;
  std::function<double(int q, int order, double z)> eval;

  double operator()(int q, int order, double z) const;
};

/// Phi_q(z) = sum_i coeffs[q][i] z^i.
OuterFunctionSet polynomial_outer_set(std::vector<std::vector<double>> coeffs);

struct TaylorConfig {
  int M = 0;
  std::optional<double> a_override;
};

/// Highest psi derivative order the difference tables provide.
inline constexpr int kMaxPsiDerivative = 3;

/// Bell aggregate over Sum_p alpha_p psi^(i)(x_p), i = 1..m-k+1.
double bell_tilde(int m, int k, std::span<const double> x, const PsiTable& table, const KstParams& params);

/// Sum_{m<=M} Sum_{k<=m} Btilde_{m,k}(x) Sum_q a^m q^m / m! Phi_q^(k)(z).
double taylor_kst_eval(const OuterFunctionSet& outer, std::span<const double> x, const TaylorConfig& cfg,
                       const PsiTable& table, const KstParams& params);

/// Untruncated Sum_q Phi_q(Sum_p alpha_p psi(x_p + a q)).
double shifted_kst_eval(const OuterFunctionSet& outer, std::span<const double> x, double a, const PsiTable& table,
                        const KstParams& params);

struct ConvergencePoint {
  double a = 0;
  double error = 0;
};

struct ConvergenceStudy {
  int M = 0;
  std::vector<ConvergencePoint> points;
  double order = 0;  // least-squares slope of log(error) against log(a)
};

/// Truncation error of taylor_kst_eval against shifted_kst_eval at each a.
ConvergenceStudy taylor_convergence(const OuterFunctionSet& outer, std::span<const double> x, int M,
                                    std::span<const double> shifts, const PsiTable& table, const KstParams& params);

}  // namespace kst
