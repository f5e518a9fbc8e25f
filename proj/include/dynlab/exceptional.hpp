#pragma once

#include "dynlab/domain.hpp"
#include "dynlab/maps.hpp"

namespace dynlab {

// Finite union of coordinate-aligned complex lines (k == 2) and isolated
// points. Membership is tested with a degree-aware relative tolerance:
// |coordinate residual| <= tol * (1 + |w|).
struct AxisLine {
    int coord = 0;  // which coordinate is pinned
    cplx value{};
};

struct AlgebraicSet {
    int k = 1;
    std::vector<AxisLine> lines;
    std::vector<Point> points;

    bool empty() const { return lines.empty() && points.empty(); }
    // smallest normalized residual over all components
    double min_residual(const Point& w) const;
    bool contains(const Point& w, double tol) const { return min_residual(w) <= tol; }
};

struct FiberCountRow {
    int n = 0;
    long long count = 0;   // preimages in X with multiplicity
    double ratio = 0.0;    // count / d_t^n
    double nearest_rejected = -1.0;  // min residual among discarded preimages, -1 if none
};

struct FiberCountSeries {
    Point probe{};
    std::vector<FiberCountRow> rows;  // n = 0..n_max
    double tau = 0.0;                 // final ratio
    bool member = false;              // count == d_t^n for every n
    int drop_n = -1;                  // first strict drop, -1 if member
};

// Counts preimages of the probe that stay in X, level by level: the frontier
// at level n+1 is the fiber of the frontier at level n intersected with X,
// multiplicities multiplying along chains. Counts are exact integers.
FiberCountSeries fiber_count_in_set(const MapSpec& m, const AlgebraicSet& X,
                                    const Point& probe, int n_max, double tol = 1e-8,
                                    long long cap = 1000000);

// count probes spread over the components of X (lines sampled inside V's
// matching coordinate region, isolated points cycled)
std::vector<Point> probes_on_set(const AlgebraicSet& X, const Domain& V, int count,
                                 uint64_t seed);

std::vector<FiberCountSeries> exceptional_verdicts(const MapSpec& m, const AlgebraicSet& X,
                                                   const std::vector<Point>& probes,
                                                   int n_max, double tol = 1e-8,
                                                   long long cap = 1000000,
                                                   int workers = 1);

}  // namespace dynlab
