#pragma once

#include <vector>

#include "dynlab/poly.hpp"

namespace dynlab {

// All complex roots of p (degree >= 1), unclustered, in deterministic order.
// Pure function: identical coefficients give identical output bits (restart
// perturbations are seeded from a hash of the input), independent of threads.
// Throws NumericalError if the iteration fails to converge.
std::vector<cplx> poly_roots(const Poly& p);

struct ClusteredRoot {
    cplx value;       // cluster mean
    int multiplicity; // cluster size
};

// Greedy merge of roots closer than tol*(1+|root|); order-stable.
std::vector<ClusteredRoot> cluster_roots(const std::vector<cplx>& roots, double tol);

// exact polar d-th roots of a, j = 0..d-1 counterclockwise
std::vector<cplx> nth_roots(cplx a, int d);

}  // namespace dynlab
