#pragma once

#include <vector>

#include "physmimo/common.hpp"

namespace physmimo {

// Coefficients are stored highest degree first.
using Poly = std::vector<cd>;

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, cd k);
Poly poly_derivative(const Poly& a);
cd poly_eval(const Poly& a, cd x);

// Substitute u = 1 + x*s into a polynomial in u, giving a polynomial in s.
Poly compose_affine(const Poly& in_u, cd x);

// All roots via the companion matrix, polished by Newton steps.
// Leading coefficients below rel_zero * max|c| are dropped (roots at infinity).
std::vector<cd> poly_roots(const Poly& c, double rel_zero = 1e-14);

// Real roots of a polynomial, ascending. A root counts as real when
// |Im r| <= imag_tol * max(1, |r|).
std::vector<double> real_roots(const Poly& c, double imag_tol = 1e-8);

} // namespace physmimo
