#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dynlab/spectrum.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dynlab;
using helpers::load_map;

namespace {

WeightedCloud cloud_of(const MapSpec& m, long long walkers, long long per_walker,
                       uint64_t seed) {
    SampleOptions so;
    so.walkers = walkers;
    so.per_walker = per_walker;
    return sample_equilibrium(m, resolve_domain(m), so, seed);
}

}  // namespace

TEST_CASE("doubling map: exponent is log 2 to near machine precision") {
    // |f'| = 2 exactly everywhere on the unit circle, so the ergodic average
    // has no variance
    MapSpec m = load_map("doubling");
    WeightedCloud c = cloud_of(m, 50, 20, 1);
    LyapOptions lo;
    lo.orbit_length = 100;
    lo.samples = 40;
    LyapSpectrum s = lyapunov(m, c, lo, 1);
    REQUIRE(s.exponents.size() == 1);
    CHECK(std::abs(s.exponents[0] - std::log(2.0)) < 1e-9);
    CHECK(s.se[0] < 1e-9);
    CHECK(s.samples_used + s.discarded == 40);
}

TEST_CASE("chebyshev: exponent log 2, recovered within error bars") {
    MapSpec m = load_map("chebyshev");
    WeightedCloud c = cloud_of(m, 100, 40, 2);
    LyapOptions lo;
    lo.orbit_length = 300;
    lo.samples = 80;
    LyapSpectrum s = lyapunov(m, c, lo, 2);
    CHECK(std::abs(s.exponents[0] - std::log(2.0)) < 5.0 * s.se[0] + 0.01);
}

TEST_CASE("skew product: exponents are log lambda and log 2") {
    MapSpec m = load_map("skew");
    WeightedCloud c = cloud_of(m, 100, 40, 3);
    LyapOptions lo;
    lo.orbit_length = 200;
    lo.samples = 80;
    LyapSpectrum s = lyapunov(m, c, lo, 3);
    REQUIRE(s.exponents.size() == 2);
    CHECK(s.exponents[0] >= s.exponents[1]);
    CHECK(std::abs(s.exponents[0] - std::log(4.0)) < 0.03);
    CHECK(std::abs(s.exponents[1] - std::log(2.0)) < 0.03);
    // the exponent sum and the direct Jacobian integral estimate the same
    // quantity two ways
    double gap_se = s.sum_se + s.jacobian_integral_se;
    CHECK(std::abs(s.sum - s.jacobian_integral) < 5.0 * gap_se + 0.02);
}

TEST_CASE("swapped product: both exponents equal half log 3") {
    // f^2 = (8z^3, 2w^3) on |z| = 2^-3/2, |w| = 2^-1/2 stretches both
    // coordinates by exactly 3
    MapSpec m = load_map("wd2z");
    WeightedCloud c = cloud_of(m, 80, 30, 4);
    LyapOptions lo;
    lo.orbit_length = 200;
    lo.samples = 60;
    LyapSpectrum s = lyapunov(m, c, lo, 4);
    REQUIRE(s.exponents.size() == 2);
    CHECK(std::abs(s.exponents[0] - 0.5 * std::log(3.0)) < 0.05);
    CHECK(std::abs(s.exponents[1] - 0.5 * std::log(3.0)) < 0.05);
}

TEST_CASE("mixing_decay: constant observables give exact zeros") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    WeightedCloud c = cloud_of(m, 50, 20, 5);
    Obs one = [](const Point&) { return cplx(1.0); };
    DecaySeries s = mixing_decay(m, V, c, one, one, 5);
    for (const auto& r : s.rows) CHECK(r.v == 0.0);
}

TEST_CASE("mixing_decay: first Fourier mode decorrelates immediately") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    WeightedCloud c = cloud_of(m, 200, 50, 6);
    Obs z1 = [](const Point& z) { return z.c[0]; };
    DecaySeries s = mixing_decay(m, V, c, z1, z1, 8);
    REQUIRE(s.rows.size() == 9);
    CHECK(std::abs(s.rows[0].v - 1.0) < 0.05);  // var of z on the circle is 1
    double noise = 5.0 / std::sqrt(static_cast<double>(c.size()));
    for (size_t n = 1; n < s.rows.size(); ++n) CHECK(s.rows[n].v < noise);
}

TEST_CASE("entropy: grid-accelerated greedy equals the quadratic scan") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    WeightedCloud c = cloud_of(m, 40, 50, 7);
    const int n_max = 8;
    std::vector<double> eps = {0.30 * V.outer_radius(), 0.16 * V.outer_radius()};
    EntropyDetail det;
    entropy_estimate(m, V, c, eps, n_max, &det);

    // replicate the estimator's orbit set (forward orbits that stay in V)
    std::vector<std::vector<Point>> orbs;
    for (const auto& p : c.points) {
        std::vector<Point> o = {p};
        bool ok = true;
        for (int t = 1; t <= n_max; ++t) {
            o.push_back(eval(m, o.back()));
            if (!V.contains(o.back())) { ok = false; break; }
        }
        if (ok) orbs.push_back(std::move(o));
    }

    for (size_t ei = 0; ei < eps.size(); ++ei) {
        REQUIRE(det.counts[ei].size() >= 3);
        for (size_t row = 0; row < det.counts[ei].size(); ++row) {
            int n = static_cast<int>(row) + 1;
            long long naive =
                oracles::naive_separated_count(orbs, m.k, n, eps[ei]);
            CHECK(det.counts[ei][row] == naive);
        }
    }
}

TEST_CASE("entropy of the doubling map at 10^4 samples") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    WeightedCloud c = cloud_of(m, 200, 50, 1);
    double R = V.outer_radius();
    std::vector<double> eps = {0.30 * R, 0.22 * R, 0.16 * R, 0.12 * R};
    double h = entropy_estimate(m, V, c, eps, 12);
    CHECK(h >= 0.6);
    CHECK(h <= 0.72);
}

TEST_CASE("entropy of a single-point cloud is zero") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    WeightedCloud c;
    c.k = 1;
    c.points.assign(50, Point(cplx(1.0)));  // fixed point of z^2
    c.weights.assign(50, 1.0 / 50);
    double h = entropy_estimate(m, V, c, {0.5}, 6);
    CHECK(h == 0.0);
}

TEST_CASE("parameter sweep: center value and sub-mean diagnostic") {
    // grid around c = 0 for z^2 + c; h(0) = 2 log 2 exactly
    MapSpec base = load_map("doubling");
    std::vector<cplx> grid;
    grid.push_back(cplx(0.0));
    std::vector<int> ring;
    for (int j = 0; j < 6; ++j) {
        double t = 2.0 * std::numbers::pi_v<double> * j / 6.0;
        grid.push_back(0.05 * cplx(std::cos(t), std::sin(t)));
        ring.push_back(j + 1);
    }
    SweepOptions opts;
    opts.walkers = 30;
    opts.per_walker = 30;
    opts.orbit_length = 100;
    opts.samples = 40;
    SweepResult r = lyapunov_sweep(base, "c", grid, 0, ring, opts, 8);
    REQUIRE(r.rows.size() == 7);
    for (const auto& row : r.rows) CHECK(row.valid);
    CHECK(r.has_center);
    CHECK(std::abs(r.center_h - 2.0 * std::log(2.0)) < 1e-9);
    CHECK(r.submean_ok);
}

TEST_CASE("parameter sweep rejects mismatched bases") {
    CHECK_THROWS_AS(
        lyapunov_sweep(load_map("doubling"), "lambda", {cplx(2.0)}, -1, {},
                       SweepOptions{}, 1),
        ConfigError);
    CHECK_THROWS_AS(
        lyapunov_sweep(load_map("skew"), "c", {cplx(0.0)}, -1, {},
                       SweepOptions{}, 1),
        ConfigError);
}
