#include "kst/combinatorics.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using kst::MultiIndex;

TEST_CASE("enumerate_partitions small cases") {
  CHECK(kst::enumerate_partitions(3, 2) == std::vector<MultiIndex>{{{1, 1}}});
  CHECK(kst::enumerate_partitions(4, 2) == std::vector<MultiIndex>{{{0, 2, 0}}, {{1, 0, 1}}});
  for (int m = 1; m <= 8; ++m) CHECK(kst::enumerate_partitions(m, m) == std::vector<MultiIndex>{{{m}}});
  CHECK(kst::enumerate_partitions(0, 0) == std::vector<MultiIndex>{{{0}}});
  CHECK(kst::enumerate_partitions(5, 0).empty());
  CHECK_THROWS_AS(kst::enumerate_partitions(2, 3), std::invalid_argument);
}

TEST_CASE("enumerate_partitions matches brute force for m <= 8") {
  for (int m = 0; m <= 8; ++m) {
    for (int k = 0; k <= m; ++k) {
      const auto fast = kst::enumerate_partitions(m, k);
      const auto slow = oracle::brute_partitions(m, k);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].j == slow[i]);
        CHECK(fast[i].blocks() == k);
        CHECK(fast[i].order() == m);
      }
    }
  }
}

TEST_CASE("partition counts are Stirling numbers of the second kind") {
  for (int m = 0; m <= 8; ++m) {
    for (int k = 0; k <= m; ++k) {
      std::uint64_t total = 0;
      for (const auto& idx : kst::enumerate_partitions(m, k)) total += kst::partition_count(idx);
      CHECK(total == oracle::set_partitions_k(m, k));
    }
  }
  // 20! / 20! with one block of 20.
  CHECK(kst::partition_count(MultiIndex{{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}}) == 1);
  // 20 singletons.
  CHECK(kst::partition_count(MultiIndex{{20}}) == 1);
  // Perfect matchings of 20 elements: 19!! = 654729075.
  MultiIndex pairs{{0, 10}};
  CHECK(kst::partition_count(pairs) == 654729075ULL);
}

TEST_CASE("bell_polynomial values") {
  CHECK(kst::bell_polynomial<double>(3, 2, std::vector<double>{2.0, 5.0}) == 30.0);
  CHECK(kst::bell_polynomial<double>(4, 4, std::vector<double>{2.0}) == 16.0);
  CHECK(kst::bell_polynomial<double>(0, 0, std::vector<double>{7.0}) == 1.0);
  CHECK(kst::bell_polynomial<double>(3, 0, std::vector<double>{1, 1, 1, 1}) == 0.0);
  CHECK_THROWS_AS(kst::bell_polynomial<double>(4, 1, std::vector<double>{1.0, 2.0}), std::invalid_argument);

  const std::vector<double> ones(9, 1.0);
  for (int m = 0; m <= 8; ++m) {
    double total = 0.0;
    for (int k = 0; k <= m; ++k) total += kst::bell_polynomial<double>(m, k, ones);
    CHECK(total == static_cast<double>(oracle::set_partitions(m)));
  }
}

TEST_CASE("bell_polynomial homogeneity") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick_m(0, 6);
  std::uniform_real_distribution<double> pick_q(0.1, 10.0), pick_arg(0.1, 2.0);
  for (int t = 0; t < 200; ++t) {
    const int m = pick_m(rng);
    const int k = std::uniform_int_distribution<int>(0, m)(rng);
    const double q = pick_q(rng);
    std::vector<double> args(static_cast<std::size_t>(m - k + 1)), scaled(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
      args[i] = pick_arg(rng);
      scaled[i] = std::pow(q, static_cast<double>(i + 1)) * args[i];
    }
    const double lhs = kst::bell_polynomial<double>(m, k, scaled);
    const double rhs = std::pow(q, m) * kst::bell_polynomial<double>(m, k, args);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs) + 1e-300);
  }
}

TEST_CASE("bell_polynomial works with long double scalars") {
  const std::vector<long double> args{2.0L, 5.0L};
  CHECK(kst::bell_polynomial<long double>(3, 2, args) == 30.0L);
}

TEST_CASE("faa_di_bruno chain rule and exp(exp(x))") {
  using Jet = kst::DerivativeJet<double>;
  const Jet f{{0.0, 3.0}}, g{{0.0, 0.5}};
  CHECK(kst::faa_di_bruno(1, f, g) == 1.5);
  CHECK(kst::faa_di_bruno(0, Jet{{4.0}}, Jet{{}}) == 4.0);

  // f = exp at g(0) = 1, g = exp at 0: (e^{e^x})'' = e^{e^x} e^x (1 + e^x) -> 2e at 0.
  const double e = std::exp(1.0);
  const Jet fe{{e, e, e}}, ge{{1.0, 1.0, 1.0}};
  CHECK(kst::faa_di_bruno(2, fe, ge) == doctest::Approx(2 * e).epsilon(1e-15));

  CHECK_THROWS_AS(kst::faa_di_bruno(3, fe, ge), std::invalid_argument);
}

TEST_CASE("faa_di_bruno agrees with finite differences of exp(sin x)") {
  for (double x : {-1.0, -0.2, 0.3, 0.9, 1.7}) {
    const double s = std::sin(x), c = std::cos(x);
    const kst::DerivativeJet<double> f{{std::exp(s), std::exp(s), std::exp(s), std::exp(s), std::exp(s)}};
    const kst::DerivativeJet<double> g{{s, c, -s, -c, s}};
    for (int m = 1; m <= 4; ++m) {
      const double fd = oracle::central_derivative([](double t) { return std::exp(std::sin(t)); }, x, m, 1e-2);
      const double exact = kst::faa_di_bruno(m, f, g);
      CHECK(std::abs(exact - fd) <= 1e-4 * std::abs(fd) + 1e-9);
    }
  }
}
