#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library routine it is used to check.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using Exact = boost::multiprecision::cpp_rational;

/// Direct recursive psi on exact rationals, extracting digits from d itself.
class ExactPsi {
 public:
  ExactPsi(int n, int gamma) : n_(n), gamma_(gamma) {}

  Exact operator()(int k, const Exact& d) {
    if (d == 1) return Exact(1);
    if (k == 1) return d;
    const auto key = std::make_pair(k, d);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const Exact scale = pow_exact(gamma_, k);
    const Exact scaled = d * scale;  // integer by construction
    const auto whole = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    const int digit = static_cast<int>(whole % gamma_);

    Exact out;
    if (digit < gamma_ - 1) {
      const long beta = n_ == 1 ? k : static_cast<long>((std::pow(n_, k) - 1) / (n_ - 1));
      out = (*this)(k - 1, d - Exact(digit) / scale) + Exact(digit) / pow_exact(gamma_, beta);
    } else {
      out = ((*this)(k, d - Exact(1) / scale) + (*this)(k - 1, d + Exact(1) / scale)) / 2;
    }
    memo_.emplace(key, out);
    return out;
  }

  static Exact pow_exact(int base, long e) {
    Exact p = 1;
    for (long i = 0; i < e; ++i) p *= base;
    return p;
  }

 private:
  int n_, gamma_;
  std::map<std::pair<int, Exact>, Exact> memo_;
};

/// Every j-vector of length m-k+1 with j_i <= m/i that meets both constraints.
inline std::vector<std::vector<int>> brute_partitions(int m, int k) {
  std::vector<std::vector<int>> out;
  const int len = m - k + 1;
  std::vector<int> j(static_cast<std::size_t>(len), 0);
  while (true) {
    int blocks = 0, order = 0;
    for (int i = 0; i < len; ++i) {
      blocks += j[static_cast<std::size_t>(i)];
      order += (i + 1) * j[static_cast<std::size_t>(i)];
    }
    if (blocks == k && order == m) out.push_back(j);
    int pos = 0;
    while (pos < len && j[static_cast<std::size_t>(pos)] == m / (pos + 1)) j[static_cast<std::size_t>(pos++)] = 0;
    if (pos == len) break;
    ++j[static_cast<std::size_t>(pos)];
  }
  return out;
}

/// Number of set partitions of {1..m} via restricted growth strings.
inline std::uint64_t set_partitions(int m) {
  if (m == 0) return 1;
  std::uint64_t count = 0;
  std::vector<int> a(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> rec = [&](int pos, int maxv) {
    if (pos == m) {
      ++count;
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      a[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, std::max(maxv, v));
    }
  };
  a[0] = 0;
  rec(1, 0);
  return count;
}

/// Number of set partitions of {1..m} into exactly k blocks with all-ones
/// weights, by brute force over growth strings.
inline std::uint64_t set_partitions_k(int m, int k) {
  if (m == 0) return k == 0 ? 1 : 0;
  std::uint64_t count = 0;
  std::function<void(int, int)> rec = [&](int pos, int maxv) {
    if (pos == m) {
      if (maxv + 1 == k) ++count;
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) rec(pos + 1, std::max(maxv, v));
  };
  rec(1, 0);
  return count;
}

/// Fourth-order central difference for derivatives of order 1..4.
inline double central_derivative(const std::function<double(double)>& f, double x, int order, double h) {
  auto F = [&](int s) { return f(x + s * h); };
  switch (order) {
    case 1: return (F(-2) - 8 * F(-1) + 8 * F(1) - F(2)) / (12 * h);
    case 2: return (-F(-2) + 16 * F(-1) - 30 * F(0) + 16 * F(1) - F(2)) / (12 * h * h);
    case 3: return (F(-3) - 8 * F(-2) + 13 * F(-1) - 13 * F(1) + 8 * F(2) - F(3)) / (8 * h * h * h);
    case 4:
      return (-F(-3) + 12 * F(-2) - 39 * F(-1) + 56 * F(0) - 39 * F(1) + 12 * F(2) - F(3)) / (6 * h * h * h * h);
    default: return std::nan("");
  }
}

/// Reduced-ODE solution at the identity inner function:
/// U'' = sin(pi x1) sin(pi x2) / (alpha_1^2 + alpha_2^2), x1 = (z - alpha_2 x2) / alpha_1,
/// U = 0 at both ends. Twice integrating sin(pi (z - c) / alpha_1) gives the
/// closed form below.
inline double reduced_identity_solution(double z, double x2, double a1, double a2) {
  const double pi = 3.14159265358979323846;
  const double x1 = (z - a2 * x2) / a1;
  return -a1 * a1 * std::sin(pi * x1) * std::sin(pi * x2) / (pi * pi * (a1 * a1 + a2 * a2));
}

}  // namespace oracle
