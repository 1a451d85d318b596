#pragma once

#include <cstdint>

// Small special-function kit backing the discrete Pareto family.  Everything
// here is deterministic scalar math with documented error bounds.
namespace branchtail::special {

// Riemann zeta for real s > 1 (Euler-Maclaurin, abs error ~1e-13 for s <= 8).
double zeta(double s);

// sum_{n >= n0} n^{-s} for s > 1, n0 >= 1.
double power_tail_sum(double s, std::uint64_t n0);

// Upper incomplete gamma Gamma(a, z), z > 0.  Valid for a > 0 and for
// negative non-integer a (callers keep a away from 0 and negative integers).
double upper_gamma(double a, double z);

// E s^X for the discrete Pareto law P(X > n) = c0 (1+n)^{-alpha}, n >= 0.
// Evaluated as 1 - (1-s) c0 sum_{n>=0} s^n (1+n)^{-alpha} with absolute error
// below 1e-12: the series is summed directly while the certified remainder
// bound c0 s^{N+1} (N+2)^{-alpha} is cheap to reach, and switches to an
// Euler-Maclaurin integral tail (via upper_gamma) when s is close to 1.
double pareto_pgf(double s, double alpha, double c0);

}  // namespace branchtail::special
