#pragma once

#include "dynlab/maps.hpp"
#include "dynlab/stats.hpp"

namespace dynlab {

struct DegreeRow {
    int n = 0;
    double estimate = 0.0;  // integral over f^-(n+1)(V) of the pulled-back form
    double se = 0.0;
    long long samples = 0;
    long long survivors = 0;  // draws that stayed in V through step n+1
};

struct DegreeTable {
    int l = 1;
    std::vector<DegreeRow> rows;  // n = 0..n_max unless truncated
    double growth_rate = 0.0;     // log-slope over the last ceil(n_max/2) rows
    size_t fit_rows = 0;
    bool truncated = false;
    std::string truncation_reason;
};

// Monte Carlo volume integrals of (f^n)^* applied to the l-th power of the
// standard Kahler form (times the complementary power) over the shrinking
// preimage domains. Integrands per unit Lebesgue volume: l = 0 constant
// (2 for k = 2), l = 1 squared Frobenius norm of Df^n, l = k squared modulus
// of det Df^n (times 2 for k = 2). Proposals are exact one-step preimage
// regions where the family admits them (product powers, skew), else the
// bounding polydisc of V. Levels whose acceptance rate drops below
// min_acceptance stop the table there.
DegreeTable degree_table(const MapSpec& m, const Domain& V, int l, int n_max,
                         long long samples, uint64_t seed, int workers = 1,
                         double min_acceptance = 1e-4);

// single-level value; throws NumericalError if starved below min_acceptance
std::pair<double, double> degree_estimate(const MapSpec& m, const Domain& V, int l, int n,
                                          long long samples, uint64_t seed, int workers = 1,
                                          double min_acceptance = 1e-4);

struct CriticalMassRow {
    int n = 0;
    double value = 0.0;  // sum over critical lines of pulled-back area / d_t^n
    double se = 0.0;
};

struct CriticalMassSeries {
    std::vector<CriticalMassRow> rows;
    double fitted_ratio = 0.0;  // geometric ratio of successive terms (NaN if all zero)
    size_t fit_points = 0;
    bool series_divergent = false;  // fitted ratio >= 1
    double total = 0.0;             // partial sum of the series
};

// Mass of the critical lines inside the level-(n+1) preimage domain, pulled
// back by f^n and normalized by d_t^n; one slice sampler per critical line.
// k == 2 only.
CriticalMassSeries critical_volume(const MapSpec& m, const Domain& V, int n_max,
                                   long long samples, uint64_t seed, int workers = 1);

struct PlbReport {
    DecaySeries series;  // v_n = degree(l=1, n) / d_t^n
    int algebraic_degree = 0;
    double alpha = 0.0;         // algebraic_degree^(k-1) / d_t
    bool alpha_applicable = false;  // d_t > algebraic_degree^(k-1)
};

int algebraic_degree(const MapSpec& m);

PlbReport plb_decay(const MapSpec& m, const Domain& V, int n_max, long long samples,
                    uint64_t seed, int workers = 1);

}  // namespace dynlab
