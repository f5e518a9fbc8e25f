#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynlab/types.hpp"

namespace dynlab {

using Obs = std::function<cplx(const Point&)>;

enum class Provenance { BackwardWalk, IteratedFiber, PeriodicPoints, Pullback, Loaded };

std::string provenance_name(Provenance p);

// Discrete measure sum w_i * delta_{x_i}. Sampling constructions produce a
// probability cloud (weights sum to 1 within 1e-9, checked; roundoff on large
// clouds rules out anything tighter); periodic-point clouds may deliberately
// carry total mass < 1 and skip that check.
struct WeightedCloud {
    int k = 1;
    std::vector<Point> points;
    std::vector<double> weights;
    Provenance provenance = Provenance::Loaded;
    uint64_t seed = 0;
    // generation parameters, recorded for reproducibility
    long long walkers = 0, per_walker = 0, burn_in = 0, kept_walkers = 0;
    std::string start_law;

    size_t size() const { return points.size(); }
    double total_mass() const;
    void require_probability(double tol = 1e-9) const;
};

cplx integrate(const WeightedCloud& c, const Obs& f);
double integrate_real(const WeightedCloud& c, const std::function<double(const Point&)>& f);

// Columnar text format: '#'-prefixed header (dimension, count, seed,
// provenance, generation parameters), then one row per point:
// re,im[,re,im],weight at 17 significant digits. Loads reproduce saved
// doubles bit-exactly.
void save_cloud(const WeightedCloud& c, std::ostream& os);
WeightedCloud load_cloud(std::istream& is);
void save_cloud_file(const WeightedCloud& c, const std::string& path);
WeightedCloud load_cloud_file(const std::string& path);

}  // namespace dynlab
