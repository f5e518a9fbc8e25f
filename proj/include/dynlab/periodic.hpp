#pragma once

#include "dynlab/cloud.hpp"
#include "dynlab/maps.hpp"

namespace dynlab {

enum class PointClass { Repelling, Saddle, Attracting, Neutral };

std::string point_class_name(PointClass c);

struct PeriodicPoint {
    Point z;
    double mult_mod[2] = {0.0, 0.0};  // eigenvalue moduli of Df^n, descending
    PointClass cls = PointClass::Neutral;
    long long multiplicity = 1;
};

struct PeriodicPointSet {
    int period = 1;
    long long expected = 0;  // d_t^period
    std::vector<PeriodicPoint> points;
    // exact: full algebraic solve; the multiplicity total must equal expected
    // (product maps on an annulus domain are exempt: off-domain solutions are
    // filtered out and the count law does not apply there).
    bool exact = false;
    bool count_lower_bound = false;  // near-return search
    long long total = 0;
};

struct PeriodicOptions {
    double neutral_tol = 1e-6;   // width of the |multiplier| = 1 band
    int direct_degree_cap = 512; // max polynomial degree solved directly
    long long count_cap = 2000000;
    const WeightedCloud* seeds = nullptr;  // for the near-return search
    uint64_t seed = 0;
};

// All fixed points of f^n (periods dividing n included), classified by the
// eigenvalue moduli of the derivative cocycle around the orbit. Uses direct
// polynomial solves while the reduced degrees fit under direct_degree_cap;
// beyond that, Newton refinement of near-returns seeded from a cloud, with
// the result flagged as a count lower bound.
PeriodicPointSet periodic_points(const MapSpec& m, int n, const PeriodicOptions& opts = {});

// Atomic measure with weight multiplicity/d_t^n per (optionally repelling
// only) point; total mass <= 1 by construction and deliberately not
// renormalized.
WeightedCloud periodic_measure(const MapSpec& m, const PeriodicPointSet& s,
                               bool repelling_only);

// max_j |integral under a - integral under b| over the test family
double discrepancy(const WeightedCloud& a, const WeightedCloud& b,
                   const std::vector<std::pair<std::string, Obs>>& fns);

}  // namespace dynlab
