#include "kst/taylor.hpp"

#include "kst/combinatorics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kst {

double OuterFunctionSet::operator()(int q, int order, double z) const {
  if (q < 0 || q >= count) throw std::out_of_range("outer function index " + std::to_string(q));
  if (order < 0 || order > max_order)
    throw std::invalid_argument("outer function derivative of order " + std::to_string(order) +
                                " not available (max " + std::to_string(max_order) + ")");
  return eval(q, order, z);
}

OuterFunctionSet polynomial_outer_set(std::vector<std::vector<double>> coeffs) {
  OuterFunctionSet set;
  set.count = static_cast<int>(coeffs.size());
  set.max_order = 64;
  set.eval = [coeffs = std::move(coeffs)](int q, int order, double z) {
    const auto& c = coeffs[static_cast<std::size_t>(q)];
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(order);) {
      double falling = 1.0;
      for (int t = 0; t < order; ++t) falling *= static_cast<double>(i - static_cast<std::size_t>(t));
      acc = acc * z + c[i] * falling;
    }
    return acc;
  };
  return set;
}

double bell_tilde(int m, int k, std::span<const double> x, const PsiTable& table, const KstParams& params) {
  if (k < 0 || k > m) throw std::invalid_argument("bell_tilde: need 0 <= k <= m");
  if (m == 0) return 1.0;
  if (k == 0) return 0.0;
  const int width = m - k + 1;
  if (width > kMaxPsiDerivative)
    throw std::invalid_argument("bell_tilde: needs psi derivative of order " + std::to_string(width) +
                                ", differencing supports up to " + std::to_string(kMaxPsiDerivative));
  if (static_cast<int>(x.size()) != params.n) throw std::invalid_argument("bell_tilde: coordinate count != n");

  std::vector<double> aggregates(static_cast<std::size_t>(width), 0.0);
  for (int i = 1; i <= width; ++i) {
    Real s = 0;
    for (int p = 1; p <= params.n; ++p)
      s += Real(params.alpha_at(p)) * psi_derivative(table, i, Real(x[static_cast<std::size_t>(p - 1)]));
    aggregates[static_cast<std::size_t>(i - 1)] = to_double(s);
  }
  return bell_polynomial<double>(m, k, aggregates);
}

double taylor_kst_eval(const OuterFunctionSet& outer, std::span<const double> x, const TaylorConfig& cfg,
                       const PsiTable& table, const KstParams& params) {
  if (cfg.M < 0) throw std::invalid_argument("taylor_kst_eval: M must be >= 0");
  if (outer.max_order < cfg.M)
    throw std::invalid_argument("taylor_kst_eval: outer functions provide derivatives to order " +
                                std::to_string(outer.max_order) + " < M = " + std::to_string(cfg.M));
  const double a = cfg.a_override.value_or(double(params.a.numerator()) / double(params.a.denominator()));
  const double z = to_double(z_map(params, table, x));

  double total = 0.0;
  double factorial = 1.0;
  for (int m = 0; m <= cfg.M; ++m) {
    if (m > 0) factorial *= m;
    if (m > 0 && a == 0.0) break;
    for (int k = 0; k <= m; ++k) {
      const double bt = bell_tilde(m, k, x, table, params);
      if (bt == 0.0) continue;
      double inner = 0.0;
      for (int q = 0; q < outer.count; ++q) inner += std::pow(a * q, m) / factorial * outer(q, k, z);
      total += bt * inner;
    }
  }
  return total;
}

double shifted_kst_eval(const OuterFunctionSet& outer, std::span<const double> x, double a, const PsiTable& table,
                        const KstParams& params) {
  if (static_cast<int>(x.size()) != params.n) throw std::invalid_argument("shifted_kst_eval: coordinate count != n");
  double total = 0.0;
  for (int q = 0; q < outer.count; ++q) {
    Real z = 0;
    for (int p = 1; p <= params.n; ++p)
      z += Real(params.alpha_at(p)) * psi_eval(table, Real(x[static_cast<std::size_t>(p - 1)]) + Real(a) * q);
    total += outer(q, 0, to_double(z));
  }
  return total;
}

ConvergenceStudy taylor_convergence(const OuterFunctionSet& outer, std::span<const double> x, int M,
                                    std::span<const double> shifts, const PsiTable& table, const KstParams& params) {
  if (shifts.size() < 2) throw std::invalid_argument("taylor_convergence: need at least two shifts");
  ConvergenceStudy study;
  study.M = M;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double a : shifts) {
    const double exact = shifted_kst_eval(outer, x, a, table, params);
    const double approx = taylor_kst_eval(outer, x, TaylorConfig{M, a}, table, params);
    const double err = std::abs(exact - approx);
    study.points.push_back({a, err});
    const double lx = std::log(a), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(shifts.size());
  study.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

}  // namespace kst
