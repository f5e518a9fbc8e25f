#pragma once

#include "dynlab/cloud.hpp"
#include "dynlab/maps.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

// Escape-rate potential of a 1D polynomial map: G(z) = lim d^-n log+ |f^n z|
// plus the leading-coefficient correction, 0 on bounded orbits. converged is
// false only when the certified tail bound cannot be driven below tol within
// n_max iterations.
struct GreenValue {
    cplx z{};
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

GreenValue green(const MapSpec& m, cplx z, int n_max = 200, double tol = 1e-12);

// Cloud-sup expansion constants: M_n = (max over cloud of |(f^n)'|)^(1/n),
// n = 1..n_max, computed in log space along forward orbits.
std::vector<double> expansion_sequence(const MapSpec& m, const WeightedCloud& cloud,
                                       int n_max);

struct HolderReport {
    double alpha = 0.0;
    double fitted_slope = 0.0;
    bool pass = false;
    bool vacuous = false;  // not enough usable radii; passes with a warning
    std::vector<double> radii_used, radii_rejected;
    int centers = 0;
    double resolution = 0.0;
    std::string warning;
};

// Checks mu(B(x, r)) <= c r^alpha on the cloud: fits the log-log slope of the
// center-sup ball mass over the given radii and passes iff slope >= alpha -
// fit_tol. Radii below the cloud resolution (~ extent/N) are rejected.
HolderReport holder_check(const MapSpec& m, const WeightedCloud& cloud, double alpha,
                          std::vector<double> radii, int centers, uint64_t seed,
                          double fit_tol = 0.05);

struct HausdorffResult {
    double hd = 0.0, se = 0.0;
    double integral = 0.0, integral_se = 0.0;  // cloud mean of log |f'|
};

// dimension(mu) = log d_t / integral of log |f'| d mu
HausdorffResult hausdorff_dimension(const MapSpec& m, const WeightedCloud& cloud);

}  // namespace dynlab
