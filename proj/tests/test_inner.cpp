#include "kst/inner.hpp"
#include "kst/io.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using kst::Real;
using kst::Rational;

namespace {

kst::PsiTable table_for(int k, int gamma = 10, int n = 2) {
  return kst::build_psi(kst::compute_constants(n, gamma, 4, k));
}

double dbl(const Real& x) { return x.convert_to<double>(); }

}  // namespace

TEST_CASE("build_grid enumerates terminating fractions") {
  const auto g1 = kst::build_grid(10, 1);
  REQUIRE(g1.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(g1.points[i] == Rational(i, 10));

  const auto g2 = kst::build_grid(10, 2);
  REQUIRE(g2.size() == 100);
  CHECK(g2.spacing() == Rational(1, 100));
  for (std::size_t i = 1; i < g2.points.size(); ++i) CHECK(g2.points[i] - g2.points[i - 1] == Rational(1, 100));
  CHECK(g2.points.back() == Rational(99, 100));
}

TEST_CASE("build_grid gamma=6 k=2 matches digit-pair enumeration") {
  std::set<Rational> brute;
  for (int i1 = 0; i1 < 6; ++i1)
    for (int i2 = 0; i2 < 6; ++i2) brute.insert(Rational(i1, 6) + Rational(i2, 36));
  const auto g = kst::build_grid(6, 2);
  REQUIRE(g.size() == 36);
  CHECK(std::vector<Rational>(brute.begin(), brute.end()) == g.points);
  for (std::size_t i = 1; i < g.points.size(); ++i) CHECK(g.points[i] - g.points[i - 1] == Rational(1, 36));
}

TEST_CASE("build_grid rejects bad bounds") {
  CHECK_THROWS_AS(kst::build_grid(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(kst::build_grid(10, 0), std::invalid_argument);
  CHECK_THROWS(kst::build_grid(10, 30));
}

TEST_CASE("compute_constants for n=2 gamma=10") {
  const auto p = kst::compute_constants(2, 10, 4);
  CHECK(p.a == Rational(1, 90));
  CHECK(p.alpha.size() == 2);
  CHECK(p.alpha_at(1) == 1.0);
  // Naive left-to-right sum of gamma^-(2^r - 1), r = 1..4.
  CHECK(p.alpha_at(2) == 0.1 + 0.001 + 1e-7 + 1e-15);
  CHECK(kst::format17(p.alpha_at(2)) == "0.10100010000000101");
  // The three-term partial sum is the 17-digit value quoted for gamma = 10.
  CHECK(kst::format17(kst::alpha_coefficient(2, 10, 2, 3)) == "0.10100010000000001");
}

TEST_CASE("compute_constants invariants over a parameter sweep") {
  for (int n = 1; n <= 4; ++n) {
    for (int gamma = 2 * n + 2; gamma <= 2 * n + 8; ++gamma) {
      const auto p = kst::compute_constants(n, gamma, 6);
      CHECK(p.a == Rational(1, gamma * (gamma - 1)));
      CHECK(p.alpha_at(1) == 1.0);
      for (int q = 2; q <= n; ++q) {
        CHECK(p.alpha_at(q) > 0.0);
        CHECK(p.alpha_at(q) < p.alpha_at(q - 1));
      }
    }
  }
}

TEST_CASE("compute_constants rejects gamma below 2n+2 and short series") {
  CHECK_THROWS_AS(kst::compute_constants(2, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(kst::compute_constants(2, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(kst::compute_constants(2, 10, 3), std::invalid_argument);
}

TEST_CASE("k=1 table is the identity") {
  const auto t = table_for(1);
  REQUIRE(t.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(t.values()[i] == Real(i) / 10);
  for (double x : {0.0, 0.05, 0.37, 0.9, 0.95, 0.999}) CHECK(dbl(kst::psi_eval(t, Real(x))) == doctest::Approx(x).epsilon(1e-15));
}

TEST_CASE("appending a zero digit keeps the shallower value") {
  const auto t1 = table_for(1), t2 = table_for(2);
  CHECK(t2.values()[10] == t1.values()[1]);
}

TEST_CASE("k=4 table matches the exact recursive evaluator at every node") {
  const auto t = table_for(4);
  oracle::ExactPsi exact(2, 10);
  const auto values = t.values();
  REQUIRE(values.size() == 10000);
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const oracle::Exact ref = exact(4, oracle::Exact(static_cast<long>(i)) / 10000);
    const Real num(boost::multiprecision::numerator(ref).convert_to<long double>());
    const Real den(boost::multiprecision::denominator(ref).convert_to<long double>());
    worst = std::max(worst, dbl(abs(values[i] - num / den)));
  }
  CHECK(worst < 1e-30);
}

TEST_CASE("psi tables are strictly increasing, nest, and stay in [0,1]") {
  for (int k = 1; k <= 4; ++k) {
    const auto t = table_for(k);
    const auto knots = t.knots();
    CHECK(knots.front() == 0);
    CHECK(knots.back() == 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) REQUIRE(knots[i] < knots[i + 1]);
    if (k > 1) {
      const auto coarse = table_for(k - 1);
      for (std::size_t i = 0; i < coarse.values().size(); ++i) CHECK(t.values()[i * 10] == coarse.values()[i]);
    }
  }
}

TEST_CASE("double-precision tables agree with the quad tables") {
  const auto params = kst::compute_constants(2, 10, 4, 3);
  const auto tq = kst::build_psi<Real>(params);
  const auto td = kst::build_psi<double>(params);
  for (std::size_t i = 0; i < td.values().size(); ++i)
    CHECK(td.values()[i] == doctest::Approx(dbl(tq.values()[i])).epsilon(1e-15));
}

TEST_CASE("non-monotone tables are rejected with the offending pair") {
  std::vector<double> knots{0.0, 0.3, 0.2, 0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9, 1.0};
  try {
    kst::BasicPsiTable<double> bad(kst::build_grid(10, 1), knots);
    FAIL("expected MonotonicityError");
  } catch (const kst::MonotonicityError& e) {
    CHECK(e.index() == 1);
    CHECK(e.left() == 0.3);
    CHECK(e.right() == 0.2);
  }
}

TEST_CASE("psi_eval interpolation and periodic extension") {
  const auto t2 = table_for(2);
  CHECK(kst::psi_eval(t2, Real(0)) == 0);
  CHECK(kst::psi_eval(t2, Real(1)) == 1);
  CHECK(kst::psi_eval(t2, Real(1.25)) == kst::psi_eval(t2, Real(0.25)) + 1);
  const Real mid = (t2.values()[0] + t2.values()[1]) / 2;
  CHECK(dbl(abs(kst::psi_eval(t2, Real(5) / 1000) - mid)) < 1e-30);
  CHECK(kst::psi_eval(t2, Real(-0.75)) == kst::psi_eval(t2, Real(0.25)) - 1);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const auto t4 = table_for(4);
  for (int i = 0; i < 200; ++i) {
    const Real x(u(rng));
    CHECK(dbl(abs(kst::psi_eval(t4, x + 1) - kst::psi_eval(t4, x) - 1)) < 1e-30);
  }
  CHECK_THROWS_AS(kst::psi_eval(t4, Real(std::numeric_limits<double>::infinity())), std::domain_error);
}

TEST_CASE("psi_derivative on the identity table") {
  const auto t = table_for(1);
  for (double x : {0.0, 0.12, 0.5, 0.77, 0.9}) {
    CHECK(dbl(kst::psi_derivative(t, 1, Real(x))) == doctest::Approx(1.0).epsilon(1e-25));
    CHECK(std::abs(dbl(kst::psi_derivative(t, 2, Real(x)))) < 1e-25);
    CHECK(std::abs(dbl(kst::psi_derivative(t, 3, Real(x)))) < 1e-25);
  }
  CHECK_THROWS_AS(kst::psi_derivative(t, 0, Real(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(kst::psi_derivative(t, 4, Real(0.5)), std::invalid_argument);
}

TEST_CASE("psi_derivative at k=4 matches quotients of raw table values") {
  const auto t = table_for(4);
  const auto v = t.values();
  const Real h = Real(1) / 10000;
  const Real d1 = (v[5001] - v[5000]) / h;
  const Real d1n = (v[5002] - v[5001]) / h;
  const Real d2 = (d1n - d1) / h;
  CHECK(dbl(abs(kst::psi_derivative(t, 1, Real(0.5)) - d1)) <= 1e-20 * dbl(abs(d1)));
  CHECK(dbl(abs(kst::psi_derivative(t, 2, Real(0.5)) - d2)) <= 1e-12 * dbl(abs(d2)) + 1e-12);
  // Near the top of the period the stencil wraps onto psi(x - 1) + 1.
  const Real top = Real(9999) / 10000;
  CHECK(dbl(abs(kst::psi_derivative(t, 1, top) - (Real(1) - v[9999]) / h)) < 1e-18);
}

TEST_CASE("psi_inverse round trips") {
  const auto t1 = table_for(1);
  for (double y : {0.0, 0.13, 0.5, 0.999, 1.0}) CHECK(dbl(kst::psi_inverse(t1, Real(y))) == doctest::Approx(y).epsilon(1e-15));

  const auto t4 = table_for(4);
  CHECK(dbl(abs(kst::psi_inverse(t4, kst::psi_eval(t4, Real(0.3))) - Real(0.3))) < 1e-20);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Real x(u(rng));
    CHECK(dbl(abs(kst::psi_inverse(t4, kst::psi_eval(t4, x)) - x)) <= 1e-12);
  }
  CHECK_THROWS_AS(kst::psi_inverse(t4, Real(1.5)), std::domain_error);
  CHECK_THROWS_AS(kst::psi_inverse(t4, Real(-0.1)), std::domain_error);
}

TEST_CASE("z_map sums weighted psi values") {
  const auto p1 = kst::compute_constants(2, 10, 4, 1);
  const auto t1 = kst::build_psi(p1);
  const std::vector<double> zero{0.0, 0.0}, edge{1.0, 0.5};
  CHECK(kst::z_map(p1, t1, zero) == 0);
  CHECK(dbl(kst::z_map(p1, t1, edge)) == doctest::Approx(p1.alpha_at(1) + 0.5 * p1.alpha_at(2)).epsilon(1e-15));

  const auto p4 = kst::compute_constants(2, 10, 4, 4);
  const auto t4 = kst::build_psi(p4);
  const auto v = t4.values();
  const std::vector<double> x{0.3, 0.7};
  auto raw = [&](double xd) {
    const Real s = Real(xd) * 10000;
    const auto i = static_cast<std::size_t>(floor(s).convert_to<double>());
    const Real w = s - Real(i);
    return v[i] + w * (v[i + 1] - v[i]);
  };
  const Real ref = Real(p4.alpha_at(1)) * raw(0.3) + Real(p4.alpha_at(2)) * raw(0.7);
  CHECK(dbl(abs(kst::z_map(p4, t4, x) - ref)) < 1e-18);
  CHECK_THROWS_AS(kst::z_map(p4, t4, std::vector<double>{0.1}), std::invalid_argument);
}

TEST_CASE("psi CSV export") {
  const auto t = table_for(1);
  std::ostringstream os;
  kst::write_psi_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "d,psi");
  int rows = 0;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == std::stod(line.substr(comma + 1)));
    ++rows;
  }
  CHECK(rows == 10);
}
