#include "kst/inner.hpp"

#include <cmath>
#include <string>

namespace kst {

std::int64_t checked_power(std::int64_t base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("checked_power: negative exponent");
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > std::numeric_limits<std::int64_t>::max() / base)
      throw std::overflow_error(std::to_string(base) + "^" + std::to_string(exponent) + " overflows 64 bits");
    out *= base;
  }
  return out;
}

std::int64_t sprecher_beta(int n, int r) {
  if (n == 1) return r;
  return (checked_power(n, r) - 1) / (n - 1);
}

GridD build_grid(int gamma, int k) {
  if (gamma < 2) throw std::invalid_argument("build_grid: gamma must be >= 2, got " + std::to_string(gamma));
  if (k < 1) throw std::invalid_argument("build_grid: k must be >= 1, got " + std::to_string(k));
  const std::int64_t count = checked_power(gamma, k);
  if (count > (std::int64_t{1} << 26))
    throw std::invalid_argument("build_grid: gamma^k = " + std::to_string(count) + " nodes is too many");

  GridD grid{gamma, k, {}};
  grid.points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) grid.points.emplace_back(i, count);
  return grid;
}

double alpha_coefficient(int n, int gamma, int p, int series_terms) {
  if (p < 1 || series_terms < 1) throw std::invalid_argument("alpha_coefficient: p and series_terms must be >= 1");
  if (p == 1) return 1.0;
  double sum = 0.0;
  for (int r = 1; r <= series_terms; ++r) {
    // (n^r - 1)/(n - 1) grows fast; once the term underflows the tail is zero.
    const double beta = n == 1 ? r : (std::pow(double(n), r) - 1.0) / (n - 1);
    const double exponent = (p - 1) * beta;
    if (exponent > 400.0) break;
    sum += std::pow(double(gamma), -exponent);
  }
  return sum;
}

KstParams compute_constants(int n, int gamma, int series_terms, int k) {
  if (n < 1) throw std::invalid_argument("compute_constants: n must be >= 1, got " + std::to_string(n));
  if (gamma < 2 * n + 2)
    throw std::invalid_argument("compute_constants: gamma = " + std::to_string(gamma) +
                                " violates gamma >= 2n+2 = " + std::to_string(2 * n + 2));
  if (series_terms < 4)
    throw std::invalid_argument("compute_constants: series_terms must be >= 4, got " + std::to_string(series_terms));
  if (k < 1) throw std::invalid_argument("compute_constants: k must be >= 1, got " + std::to_string(k));

  KstParams params;
  params.n = n;
  params.gamma = gamma;
  params.k = k;
  params.series_terms = series_terms;
  params.a = Rational(1, std::int64_t{gamma} * (gamma - 1));
  params.alpha.reserve(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p) params.alpha.push_back(alpha_coefficient(n, gamma, p, series_terms));
  validate(params);
  return params;
}

void validate(const KstParams& params) {
  if (params.n < 1) throw std::invalid_argument("KstParams: n must be >= 1");
  if (params.gamma < 2 * params.n + 2) throw std::invalid_argument("KstParams: gamma must be >= 2n+2");
  if (params.k < 1) throw std::invalid_argument("KstParams: k must be >= 1");
  if (params.series_terms < 4) throw std::invalid_argument("KstParams: series_terms must be >= 4");
  if (params.a != Rational(1, std::int64_t{params.gamma} * (params.gamma - 1)))
    throw std::invalid_argument("KstParams: a must equal 1/(gamma(gamma-1))");
  if (static_cast<int>(params.alpha.size()) != params.n)
    throw std::invalid_argument("KstParams: need exactly n alpha coefficients");
  if (params.alpha.front() != 1.0) throw std::invalid_argument("KstParams: alpha_1 must be 1");
  for (std::size_t p = 1; p < params.alpha.size(); ++p) {
    if (!(params.alpha[p] > 0.0 && params.alpha[p] < params.alpha[p - 1]))
      throw std::invalid_argument("KstParams: alpha_p must be positive and strictly decreasing");
  }
}

}  // namespace kst
