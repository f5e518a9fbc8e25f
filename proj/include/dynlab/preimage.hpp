#pragma once

#include <vector>

#include "dynlab/maps.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

struct PreimagePoint {
    Point w;
    long long multiplicity = 1;
};

struct PreimageSet {
    Point base;
    int order = 1;  // n in f^-n
    std::vector<PreimagePoint> points;
    long long total = 0;  // sum of multiplicities; always d_t^order
};

// Full fiber f^-1(z) with multiplicities; total always equals d_t exactly or
// a NumericalError is thrown (a mismatched solve is never silently patched).
// Residual acceptance: |f(w) - z| <= tol * (1 + |z|) per point.
PreimageSet fiber(const MapSpec& m, const Point& z, double tol = 1e-9);

// f^-n(z) by breadth-first expansion; multiplicities multiply along chains.
// Guard: d_t^n <= cap (default 10^6), else ConfigError.
PreimageSet iterated_fiber(const MapSpec& m, const Point& z, int n,
                           long long cap = 1000000, double tol = 1e-9);

// One draw from the exact single-step backward transition: each preimage is
// selected with probability multiplicity/d_t.
Point random_preimage(const MapSpec& m, const Point& z, Rng& rng, double tol = 1e-9);

}  // namespace dynlab
