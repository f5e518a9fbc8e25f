#pragma once

#include <vector>

#include "dynlab/types.hpp"

namespace dynlab {

// Coefficients in ascending degree; invariant: trimmed (leading coeff != 0)
// unless the polynomial is identically zero (then size() == 1, coeff 0).
using Poly = std::vector<cplx>;

Poly trim(Poly p);

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline bool is_zero(const Poly& p) {
    return p.empty() || (p.size() == 1 && p[0] == cplx(0.0));
}

cplx horner(const Poly& p, cplx z);

// evaluates p and p' in one sweep
void horner2(const Poly& p, cplx z, cplx& val, cplx& der);

Poly derivative(const Poly& p);

Poly add(const Poly& a, const Poly& b);
Poly multiply(const Poly& a, const Poly& b);

// outer(inner(z)) by Horner over the outer coefficients
Poly compose(const Poly& outer, const Poly& inner);

// n-fold self-composition p^(n); degree (deg p)^n
Poly iterate_poly(const Poly& p, int n);

// |z| > cauchy_radius implies p(z) != 0; also an escape radius for iteration
// of monic-normalized p in the sense that the filled-in invariant set lies
// inside this disc.
double cauchy_radius(const Poly& p);

// sum of |coeff_i| * R^i; upper bound for |p| on the closed disc of radius R
double sup_on_disc(const Poly& p, double R);

cplx ipow(cplx z, int n);

}  // namespace dynlab
