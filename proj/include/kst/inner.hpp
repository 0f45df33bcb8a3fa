#pragma once

// Sprecher constants and the Koppen-corrected inner function psi.

#include "kst/real.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace kst {

using Rational = boost::rational<std::int64_t>;

struct KstParams {
  int n = 2;
  int gamma = 10;
  int k = 1;
  Rational a{1, 90};
  std::vector<double> alpha;  // alpha[p - 1] holds alpha_p
  int series_terms = 4;

  double alpha_at(int p) const { return alpha.at(static_cast<std::size_t>(p - 1)); }
};

/// Terminating base-gamma fractions with at most k digits.
struct GridD {
  int gamma = 10;
  int k = 1;
  std::vector<Rational> points;

  std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }
  Rational spacing() const { return Rational(1, size()); }
};

class MonotonicityError : public std::runtime_error {
 public:
  MonotonicityError(std::int64_t index, double left, double right)
      : std::runtime_error(describe(index, left, right)), index_(index), left_(left), right_(right) {}

  std::int64_t index() const { return index_; }
  double left() const { return left_; }
  double right() const { return right_; }

 private:
  static std::string describe(std::int64_t index, double left, double right) {
    std::ostringstream os;
    os.precision(17);
    os << "psi table not strictly increasing between nodes " << index << " and " << index + 1
       << ": " << left << " >= " << right;
    return os.str();
  }

  std::int64_t index_;
  double left_;
  double right_;
};

/// base^exponent, throwing std::overflow_error instead of wrapping.
std::int64_t checked_power(std::int64_t base, int exponent);

/// Exponent (n^r - 1) / (n - 1); equals r when n == 1.
std::int64_t sprecher_beta(int n, int r);

GridD build_grid(int gamma, int k);

/// Truncated series for alpha_p, summed in ascending r with double arithmetic.
double alpha_coefficient(int n, int gamma, int p, int series_terms);

KstParams compute_constants(int n, int gamma, int series_terms, int k = 1);

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const KstParams& params);

template <typename Scalar = Real>
class BasicPsiTable {
 public:
  using scalar_type = Scalar;

  /// knots holds psi at every grid point followed by psi(1) = 1.
  BasicPsiTable(GridD grid, std::vector<Scalar> knots) : grid_(std::move(grid)), knots_(std::move(knots)) {
    if (static_cast<std::int64_t>(knots_.size()) != grid_.size() + 1)
      throw std::invalid_argument("psi table needs one value per grid point plus psi(1)");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      if (!(knots_[i] < knots_[i + 1]))
        throw MonotonicityError(static_cast<std::int64_t>(i), to_double(knots_[i]), to_double(knots_[i + 1]));
    }
    if (knots_.front() != Scalar(0) || knots_.back() != Scalar(1))
      throw std::invalid_argument("psi table must span [0, 1]");
    step_ = Scalar(1) / Scalar(grid_.size());
  }

  const GridD& grid() const { return grid_; }
  int gamma() const { return grid_.gamma; }
  int depth() const { return grid_.k; }
  std::int64_t size() const { return grid_.size(); }

  std::span<const Scalar> values() const { return {knots_.data(), knots_.size() - 1}; }
  std::span<const Scalar> knots() const { return knots_; }

  /// Node spacing gamma^-k.
  const Scalar& step() const { return step_; }

  /// Linear interpolation on [0, 1]; callers reduce the argument first.
  Scalar interpolate(const Scalar& t) const {
    const Scalar scaled = t * Scalar(size());
    auto i = static_cast<std::int64_t>(to_double(floor_of(scaled)));
    i = std::clamp<std::int64_t>(i, 0, size() - 1);
    const Scalar w = scaled - Scalar(i);
    const auto& lo = knots_[static_cast<std::size_t>(i)];
    const auto& hi = knots_[static_cast<std::size_t>(i + 1)];
    return lo + w * (hi - lo);
  }

 private:
  GridD grid_;
  std::vector<Scalar> knots_;
  Scalar step_;
};

using PsiTable = BasicPsiTable<Real>;

/// Three-branch recursion over depth: identity at depth 1, a digit shift for
/// trailing digits below gamma - 1, and averaging of neighbours otherwise.
template <typename Scalar = Real>
BasicPsiTable<Scalar> build_psi(const KstParams& params) {
  validate(params);
  const int gamma = params.gamma;

  std::vector<Scalar> prev(static_cast<std::size_t>(gamma) + 1);
  for (int i = 0; i < gamma; ++i) prev[static_cast<std::size_t>(i)] = Scalar(i) / Scalar(gamma);
  prev.back() = Scalar(1);

  for (int level = 2; level <= params.k; ++level) {
    const std::int64_t count = checked_power(gamma, level);
    Scalar denom = 1;
    for (std::int64_t t = 0; t < sprecher_beta(params.n, level); ++t) denom *= Scalar(gamma);
    const Scalar shift = Scalar(1) / denom;

    std::vector<Scalar> cur(static_cast<std::size_t>(count) + 1);
    for (std::int64_t i = 0; i < count; ++i) {
      const auto digit = i % gamma;
      const auto prefix = static_cast<std::size_t>(i / gamma);
      auto& out = cur[static_cast<std::size_t>(i)];
      if (digit < gamma - 1)
        out = prev[prefix] + Scalar(digit) * shift;
      else
        out = (cur[static_cast<std::size_t>(i - 1)] + prev[prefix + 1]) / Scalar(2);
    }
    cur.back() = Scalar(1);
    prev = std::move(cur);
  }
  return BasicPsiTable<Scalar>(build_grid(gamma, params.k), std::move(prev));
}

/// psi(x) = psi(x - floor(x)) + floor(x) outside [0, 1).
template <typename Scalar>
Scalar psi_eval(const BasicPsiTable<Scalar>& table, const std::type_identity_t<Scalar>& x) {
  using std::isfinite;
  if (!isfinite(to_double(x))) throw std::domain_error("psi_eval: argument is not finite");
  const Scalar whole = floor_of(x);
  return table.interpolate(x - whole) + whole;
}

/// Forward differences with step gamma^-k, nested `order` times.
template <typename Scalar>
Scalar psi_derivative(const BasicPsiTable<Scalar>& table, int order, const std::type_identity_t<Scalar>& x) {
  if (order < 1 || order > 3)
    throw std::invalid_argument("psi_derivative: order must be 1, 2 or 3, got " + std::to_string(order));
  const Scalar& h = table.step();
  std::vector<Scalar> d(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) d[static_cast<std::size_t>(j)] = psi_eval(table, x + Scalar(j) * h);
  for (int level = 0; level < order; ++level) {
    for (int j = 0; j < order - level; ++j)
      d[static_cast<std::size_t>(j)] = (d[static_cast<std::size_t>(j + 1)] - d[static_cast<std::size_t>(j)]) / h;
  }
  return d.front();
}

/// Inverse of psi on [0, 1]: bracket by bisection over the knots, then solve the
/// linear piece.
template <typename Scalar>
Scalar psi_inverse(const BasicPsiTable<Scalar>& table, const std::type_identity_t<Scalar>& y) {
  const Scalar slack = Scalar(64) * Scalar(std::numeric_limits<Scalar>::epsilon());
  if (!(y >= -slack && y <= Scalar(1) + slack)) {
    std::ostringstream os;
    os.precision(17);
    os << "psi_inverse: y = " << to_double(y) << " outside the valid range [0, 1]";
    throw std::domain_error(os.str());
  }
  const Scalar target = std::clamp(y, Scalar(0), Scalar(1));
  const auto knots = table.knots();
  auto it = std::upper_bound(knots.begin(), knots.end(), target);
  auto i = static_cast<std::int64_t>(it - knots.begin()) - 1;
  i = std::clamp<std::int64_t>(i, 0, table.size() - 1);
  const auto& lo = knots[static_cast<std::size_t>(i)];
  const auto& hi = knots[static_cast<std::size_t>(i + 1)];
  return (Scalar(i) + (target - lo) / (hi - lo)) / Scalar(table.size());
}

/// z = sum_p alpha_p psi(x_p).
template <typename Scalar>
Scalar z_map(const KstParams& params, const BasicPsiTable<Scalar>& table, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.n)
    throw std::invalid_argument("z_map: expected " + std::to_string(params.n) + " coordinates, got " +
                                std::to_string(x.size()));
  Scalar z = 0;
  for (int p = 1; p <= params.n; ++p)
    z += Scalar(params.alpha_at(p)) * psi_eval(table, Scalar(x[static_cast<std::size_t>(p - 1)]));
  return z;
}

}  // namespace kst
