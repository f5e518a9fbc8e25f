#pragma once

#include "dynlab/measure.hpp"

namespace dynlab {

struct LyapOptions {
    int orbit_length = 200;
    int samples = 100;
    int workers = 1;
    double max_discard_fraction = 0.10;
};

struct LyapSpectrum {
    std::vector<double> exponents;  // descending, one per complex dimension
    std::vector<double> se;
    double sum = 0.0, sum_se = 0.0;
    // direct cloud integral of log |det Df| (= half the log real Jacobian)
    double jacobian_integral = 0.0, jacobian_integral_se = 0.0;
    int orbit_length = 0;
    int samples_used = 0;
    int discarded = 0;
};

// Ergodic averages of the derivative cocycle along equilibrium orbits. Orbits
// are realized as reversed backward walks started from cloud points: the
// reversed sequence is an exact forward orbit (residual-checked each step)
// that never leaves the invariant set, which forward iteration in floating
// point cannot guarantee at this length. For k == 2 the cocycle is
// re-orthonormalized (QR) at every step. Orbits hitting a singular derivative
// are discarded; more than max_discard_fraction discarded aborts.
LyapSpectrum lyapunov(const MapSpec& m, const WeightedCloud& cloud,
                      const LyapOptions& opts, uint64_t seed);

// |cov(phi o f^n, psi)| under the cloud for n = 0..n_max, with forward
// orbits; both factors centered, so a constant observable gives exact zeros.
DecaySeries mixing_decay(const MapSpec& m, const Domain& V, const WeightedCloud& cloud,
                         const Obs& phi, const Obs& psi, int n_max);

struct EntropyDetail {
    std::vector<double> eps;
    std::vector<std::vector<long long>> counts;  // counts[e][n-1], n = 1..n_max
    std::vector<double> slopes;                  // per-eps fitted slope
    std::vector<int> fit_lo, fit_hi;             // fitted n-window per eps
};

// Greedy maximal separated subsets of cloud orbits under the length-n sup
// metric; the estimate is the median over eps of the log-count growth slope,
// fitted on the window where counts still grow geometrically and are not yet
// saturated.
double entropy_estimate(const MapSpec& m, const Domain& V, const WeightedCloud& cloud,
                        const std::vector<double>& eps, int n_max,
                        EntropyDetail* detail = nullptr);

struct SweepOptions {
    long long walkers = 40;
    long long per_walker = 50;
    int orbit_length = 150;
    int samples = 60;
    int workers = 1;
};

struct SweepRow {
    cplx s{};
    double h = 0.0;   // 2 * sum of exponents (log real Jacobian integral)
    double se = 0.0;
    bool valid = false;
    std::string note;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool has_center = false;
    double center_h = 0.0, center_se = 0.0;
    double ring_mean = 0.0, ring_se = 0.0;
    bool submean_ok = true;  // center <= ring mean + 3 sigma
};

// Per-parameter-value pipeline (domain, cloud, exponents) for h(s) = 2 sum
// lambda_i(s); parameter is the constant coefficient ("c", Poly1D) or the
// skew multiplier ("lambda", Skew2D). Points that fail to validate are
// reported invalid, never fatal. If center/ring indices are given the
// sub-mean-value diagnostic is evaluated.
SweepResult lyapunov_sweep(const MapSpec& base, const std::string& param,
                           const std::vector<cplx>& grid, int center_index,
                           const std::vector<int>& ring, const SweepOptions& opts,
                           uint64_t seed);

}  // namespace dynlab
