#pragma once

// Plain-text exports. Numbers are written with 17 significant digits so equal
// inputs give byte-identical files.

#include "kst/bvp.hpp"
#include "kst/inner.hpp"
#include "kst/poisson.hpp"
#include "kst/real.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace kst {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// d,psi
void write_psi_csv(std::ostream& os, const PsiTable& table);
/// x,psi,dpsi,d2psi at the grid nodes
void write_psi_derivs_csv(std::ostream& os, const PsiTable& table);
/// z,U,W
void write_solution_csv(std::ostream& os, const BvpSolution& sol);
/// iter,res_inf
void write_convergence_log(std::ostream& os, const NewtonReport& report);
/// x1,x2,u_numeric,u_analytic,abs_err
void write_field_csv(std::ostream& os, const Field2D& numeric, const Field2D& analytic);

}  // namespace kst
