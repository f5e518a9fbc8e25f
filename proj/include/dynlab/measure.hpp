#pragma once

#include <utility>

#include "dynlab/cloud.hpp"
#include "dynlab/maps.hpp"
#include "dynlab/preimage.hpp"
#include "dynlab/stats.hpp"

namespace dynlab {

// Steps until backward contraction shrinks the domain diameter below 1e-9,
// plus slack: 20 + ceil(log(diam V / 1e-9) / log d_t).
int default_burn_in(const MapSpec& m, const Domain& V);

// w_0 = start, then w_{t+1} drawn from the exact backward transition; each
// step is residual-checked. Returns steps+1 points.
std::vector<Point> backward_walk(const MapSpec& m, const Point& start, int steps,
                                 Rng& rng, double tol = 1e-9);

struct SampleOptions {
    long long walkers = 100;
    long long per_walker = 100;
    long long burn_in = -1;          // -1: default_burn_in
    std::string start_law = "uniform";  // "uniform" | "center" | "point"
    Point start_point{};
    double max_failed_fraction = 0.01;
    int workers = 1;
};

// Equal-weight cloud from independent backward walks; per-walker RNG streams
// make the result identical for any worker count. Walkers whose walk fails
// (solver failure or domain exit) are dropped; more than
// max_failed_fraction of them failing aborts.
WeightedCloud sample_equilibrium(const MapSpec& m, const Domain& V,
                                 const SampleOptions& opts, uint64_t seed);

// Averaging operator over the fiber: (1/d_t) sum multiplicity * f(w). Exact.
cplx transfer_apply(const MapSpec& m, const Obs& phi, const Point& z);

struct TransferValue {
    cplx value{};
    double se = 0.0;
    bool exact = false;
};

// n-fold averaging operator at z: exact fiber expansion while d_t^n <=
// budget, otherwise Monte Carlo over `budget` backward chains.
TransferValue transfer_iterate(const MapSpec& m, const Obs& phi, int n, const Point& z,
                               long long budget, uint64_t seed);

struct InvarianceRow {
    std::string name;
    double push_residual = 0.0, push_se = 0.0;  // |mean phi(f(x)) - mean phi|
    double pull_residual = 0.0, pull_se = 0.0;  // |mean (L phi)(x) - mean phi|
};

// Both invariance directions for each named observable; standard errors by
// per-walker block means when the cloud records its walker layout.
std::vector<InvarianceRow> invariance_report(const MapSpec& m, const WeightedCloud& c,
                                             const std::vector<std::pair<std::string, Obs>>& fns);

// ||L^n phi - c||_{L2(cloud)} for n = 0..n_max over a strided subsample,
// c = cloud mean of phi. Exact fiber expansion while d_t^n <= budget.
DecaySeries l2_convergence(const MapSpec& m, const WeightedCloud& c, const Obs& phi,
                           int n_max, long long budget = 4096, int subsample = 256,
                           uint64_t seed = 1);

// Built-in test family: normalized moment monomials, then Gaussian bumps
// with seeded centers/widths inside V.
std::vector<std::pair<std::string, Obs>> default_observables(int k, const Domain& V,
                                                             uint64_t seed, int count);

}  // namespace dynlab
