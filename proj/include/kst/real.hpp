#pragma once

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <string>

namespace kst {

/// Working precision for inner-function tables. Node gaps reach gamma^-15 at
/// depth 4, below the resolution of a double near 1.
using Real = boost::multiprecision::float128;

inline double to_double(double x) { return x; }
inline double to_double(const Real& x) { return x.convert_to<double>(); }

inline double floor_of(double x) { return std::floor(x); }
inline Real floor_of(const Real& x) { return boost::multiprecision::floor(x); }

// 17 significant digits, shortest fixed/exponent form ("%.17g").
std::string format17(double x);
std::string format17(const Real& x);

}  // namespace kst
