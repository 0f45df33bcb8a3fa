#pragma once

// Partial Bell polynomials and Faa di Bruno composition derivatives.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kst {

/// Multiplicities (j_1, ..., j_{m-k+1}) with sum j_i = k and sum i*j_i = m.
struct MultiIndex {
  std::vector<int> j;

  int order() const;   // sum i * j_i
  int blocks() const;  // sum j_i
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Largest m supported by the exact 64-bit coefficient arithmetic.
inline constexpr int kMaxBellOrder = 20;

/// All multi-indices for B_{m,k}, lexicographically ascending in (j_1, j_2, ...).
std::vector<MultiIndex> enumerate_partitions(int m, int k);

/// m! / prod(j_i! (i!)^{j_i}): the number of set partitions of an m-set with
/// the given block multiplicities. Exact.
std::uint64_t partition_count(const MultiIndex& index);

/// Derivatives of a univariate function at one point; values[i] is the i-th
/// derivative. Entry 0 is ignored where an operation only needs i >= 1.
template <typename Scalar = double>
struct DerivativeJet {
  std::vector<Scalar> values;

  std::size_t size() const { return values.size(); }
  const Scalar& operator[](std::size_t i) const { return values[i]; }
};

/// B_{m,k}(args[0], ..., args[m-k]).
template <typename Scalar>
Scalar bell_polynomial(int m, int k, std::span<const Scalar> args) {
  if (m >= 0 && k >= 0 && k <= m && static_cast<int>(args.size()) < m - k + 1)
    throw std::invalid_argument("bell_polynomial: B_{" + std::to_string(m) + "," + std::to_string(k) + "} needs " +
                                std::to_string(m - k + 1) + " arguments, got " + std::to_string(args.size()));
  Scalar total(0);
  for (const auto& index : enumerate_partitions(m, k)) {
    Scalar term(static_cast<double>(partition_count(index)));
    for (std::size_t i = 0; i < index.j.size(); ++i) {
      for (int e = 0; e < index.j[i]; ++e) term *= args[i];
    }
    total += term;
  }
  return total;
}

template <typename Scalar>
Scalar bell_polynomial(int m, int k, const std::vector<Scalar>& args) {
  return bell_polynomial<Scalar>(m, k, std::span<const Scalar>(args));
}

/// m-th derivative of f(g(x)): sum_k f^(k)(g(x)) B_{m,k}(g'(x), ..., g^(m-k+1)(x)).
template <typename Scalar>
Scalar faa_di_bruno(int m, const DerivativeJet<Scalar>& f_jet, const DerivativeJet<Scalar>& g_jet) {
  if (m < 0) throw std::invalid_argument("faa_di_bruno: negative order");
  const auto need = static_cast<std::size_t>(m) + 1;
  if (f_jet.size() < need || (m > 0 && g_jet.size() < need))
    throw std::invalid_argument("faa_di_bruno: order " + std::to_string(m) + " needs jets of length " +
                                std::to_string(need) + ", got f:" + std::to_string(f_jet.size()) +
                                " g:" + std::to_string(g_jet.size()));
  if (m == 0) return f_jet[0];
  const std::span<const Scalar> g_derivs(g_jet.values.data() + 1, static_cast<std::size_t>(m));
  Scalar total(0);
  for (int k = 1; k <= m; ++k) total += f_jet[static_cast<std::size_t>(k)] * bell_polynomial<Scalar>(m, k, g_derivs);
  return total;
}

}  // namespace kst
