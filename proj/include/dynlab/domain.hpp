#pragma once

#include <vector>

#include "dynlab/rng.hpp"
#include "dynlab/types.hpp"

namespace dynlab {

enum class Shape { Ball, Polydisc, Annulus2D };

// Reference domain V. Ball is the Euclidean ball in C^k (disc when k == 1),
// radii = {R}. Polydisc: radii = {r_1..r_k}. Annulus2D (k == 2 only):
// radii = {in_1, out_1, in_2, out_2}, product of two round annuli.
struct Domain {
    Shape shape = Shape::Ball;
    int k = 1;
    Point center{};
    std::vector<double> radii;

    bool contains(const Point& z) const { return boundary_margin(z) >= 0.0; }

    // distance-like gauge to the boundary: positive inside, negative outside
    double boundary_margin(const Point& z) const;

    double outer_radius() const;

    // diameter upper bound (used to size burn-in)
    double diameter() const;

    // Lebesgue volume of the solid (area for k == 1, 4-volume for k == 2)
    double volume() const;

    Point sample_uniform(Rng& rng) const;

    // i-th of n roughly equidistributed boundary points plus a seeded jitter
    // stream; callers pass i = 0..n-1
    Point boundary_point(int i, int n, Rng& rng) const;

    void check() const;  // throws ConfigError on malformed radii
};

}  // namespace dynlab
