#pragma once

#include <complex>
#include <vector>

#include "lcn/poly.hpp"

namespace lcn {

// Coefficient-based root radius A = (n/|a_n|) * max_i |a_i|;
// every root z satisfies |z| <= A. Requires degree >= 1.
double root_bound(const ComplexPoly& p);

// All n roots (with multiplicity) by simultaneous Aberth-Ehrlich
// iteration. Initial guesses sit on a circle of radius root_bound/2,
// iteration cap 1000. Throws NoConvergence if neither the update nor
// the residual criterion is met within the cap.
std::vector<std::complex<double>> roots(const ComplexPoly& p,
                                        double tol = 1e-13);

// Factorization p = sign * u_1 * ... * u_n into linear factors with
// ||u_i||_1 <= 6 n T, T = max(||p||_1, 1).
struct LinearFactorization {
  double sign = 1.0;                 // sgn(a_n)
  std::vector<ComplexPoly> factors;  // degree-1 each
  double bound_T = 1.0;

  ComplexPoly product() const;
};

LinearFactorization factor_linear(const RealPoly& p);

// Complex values that are (numerically) roots of every input polynomial:
// candidates from the first poly's root list, kept when
// |p_j(z)| <= tol * ||p_j||_1 * max(1,|z|)^deg for all j, deduplicated
// within radius sqrt(tol). Empty result certifies "no common roots"
// at this tolerance.
std::vector<std::complex<double>> common_roots(
    const std::vector<RealPoly>& polys, double tol = 1e-7);

}  // namespace lcn
