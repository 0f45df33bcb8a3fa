#include "kst/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <quadmath.h>

namespace kst {

std::string format17(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format17(const Real& x) {
  __float128 v = x.backend().value();
  if (v == 0) v = 0;
  char buf[64];
  quadmath_snprintf(buf, sizeof buf, "%.17Qg", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_psi_csv(std::ostream& os, const PsiTable& table) {
  os << "d,psi\n";
  const auto values = table.values();
  const auto& points = table.grid().points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& d = points[i];
    os << format17(double(d.numerator()) / double(d.denominator())) << ',' << format17(values[i]) << '\n';
  }
}

void write_psi_derivs_csv(std::ostream& os, const PsiTable& table) {
  os << "x,psi,dpsi,d2psi\n";
  const auto& points = table.grid().points;
  for (const auto& d : points) {
    const Real x = Real(d.numerator()) / Real(d.denominator());
    os << format17(x.convert_to<double>()) << ',' << format17(psi_eval(table, x)) << ','
       << format17(psi_derivative(table, 1, x)) << ',' << format17(psi_derivative(table, 2, x)) << '\n';
  }
}

void write_solution_csv(std::ostream& os, const BvpSolution& sol) {
  os << "z,U,W\n";
  for (Eigen::Index i = 0; i < sol.nodes.size(); ++i)
    os << format17(sol.nodes[i]) << ',' << format17(sol.U[i]) << ',' << format17(sol.W[i]) << '\n';
}

void write_convergence_log(std::ostream& os, const NewtonReport& report) {
  os << "iter,res_inf\n";
  for (std::size_t i = 0; i < report.residual_history.size(); ++i)
    os << i + 1 << ',' << format17(report.residual_history[i]) << '\n';
}

void write_field_csv(std::ostream& os, const Field2D& numeric, const Field2D& analytic) {
  if (numeric.nx() != analytic.nx() || numeric.ny() != analytic.ny())
    throw std::invalid_argument("write_field_csv: field meshes differ");
  os << "x1,x2,u_numeric,u_analytic,abs_err\n";
  for (Eigen::Index j = 0; j < numeric.ny(); ++j) {
    for (Eigen::Index i = 0; i < numeric.nx(); ++i) {
      const double un = numeric(i, j);
      const double ua = analytic(i, j);
      os << format17(numeric.x1(i)) << ',' << format17(numeric.x2(j)) << ',' << format17(un) << ','
         << format17(ua) << ',' << format17(std::abs(un - ua)) << '\n';
    }
  }
}

}  // namespace kst
