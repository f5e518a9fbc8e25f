#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dynlab/poly.hpp"
#include "dynlab/roots.hpp"
#include "dynlab/rng.hpp"
#include "oracles.hpp"

using namespace dynlab;

namespace {

double min_dist_to(const std::vector<cplx>& roots, cplx target) {
    double best = 1e300;
    for (cplx r : roots) best = std::min(best, std::abs(r - target));
    return best;
}

}  // namespace

TEST_CASE("horner agrees with naive monomial evaluation") {
    Rng rng = Rng::stream(7, {1});
    for (int trial = 0; trial < 50; ++trial) {
        Poly p;
        int deg = 1 + static_cast<int>(rng.bounded(8));
        for (int i = 0; i <= deg; ++i)
            p.push_back(cplx(rng.normal(), rng.normal()));
        if (std::abs(p.back()) < 1e-3) p.back() = 1.0;
        cplx z(rng.normal(), rng.normal());
        cplx want = oracles::naive_poly_eval(p, z);
        CHECK(std::abs(horner(p, z) - want) < 1e-9 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("horner2 derivative matches derivative-then-horner") {
    Poly p = {cplx(2.0), cplx(-1.0), cplx(0.0), cplx(3.0)};  // 2 - z + 3z^3
    cplx z(0.7, -0.3);
    cplx val, der;
    horner2(p, z, val, der);
    CHECK(std::abs(val - horner(p, z)) < 1e-14);
    CHECK(std::abs(der - horner(derivative(p), z)) < 1e-14);
}

TEST_CASE("iterate_poly degree and value law") {
    Poly p = {cplx(-2.0), cplx(0.0), cplx(1.0)};  // z^2 - 2
    Poly p3 = iterate_poly(p, 3);
    CHECK(degree(p3) == 8);
    cplx z(0.4, 0.1);
    cplx by_hand = horner(p, horner(p, horner(p, z)));
    CHECK(std::abs(horner(p3, z) - by_hand) < 1e-12);
}

TEST_CASE("cauchy_radius bounds every root") {
    Rng rng = Rng::stream(11, {2});
    for (int trial = 0; trial < 20; ++trial) {
        Poly p;
        int deg = 2 + static_cast<int>(rng.bounded(5));
        for (int i = 0; i <= deg; ++i)
            p.push_back(cplx(rng.normal(), rng.normal()));
        if (std::abs(p.back()) < 1e-3) p.back() = 1.0;
        double R = cauchy_radius(p);
        for (cplx r : poly_roots(p)) CHECK(std::abs(r) <= R + 1e-9);
    }
}

TEST_CASE("roots of a known factorization") {
    // (z-1)(z-2)(z-3) = -6 + 11z - 6z^2 + z^3
    Poly p = {cplx(-6.0), cplx(11.0), cplx(-6.0), cplx(1.0)};
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 3);
    CHECK(min_dist_to(roots, cplx(1.0)) < 1e-10);
    CHECK(min_dist_to(roots, cplx(2.0)) < 1e-10);
    CHECK(min_dist_to(roots, cplx(3.0)) < 1e-10);
}

TEST_CASE("poly_roots is deterministic") {
    Poly p = {cplx(0.3, 0.1), cplx(-1.2), cplx(0.0, 0.5), cplx(1.0)};
    auto a = poly_roots(p);
    auto b = poly_roots(p);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("random polynomials: count equals degree, residuals small") {
    Rng rng = Rng::stream(3, {9});
    for (int trial = 0; trial < 25; ++trial) {
        Poly p;
        int deg = 2 + static_cast<int>(rng.bounded(15));
        for (int i = 0; i <= deg; ++i)
            p.push_back(cplx(rng.normal(), rng.normal()));
        if (std::abs(p.back()) < 1e-3) p.back() = 1.0;
        auto roots = poly_roots(p);
        REQUIRE(static_cast<int>(roots.size()) == deg);
        double scale = sup_on_disc(p, cauchy_radius(p));
        for (cplx r : roots)
            CHECK(std::abs(horner(p, r)) < 1e-9 * scale);
    }
}

TEST_CASE("nth_roots are exact d-th roots in counterclockwise order") {
    auto r = nth_roots(cplx(16.0), 4);
    REQUIRE(r.size() == 4);
    CHECK(std::abs(r[0] - cplx(2.0)) < 1e-14);
    CHECK(std::abs(r[1] - cplx(0.0, 2.0)) < 1e-14);
    for (cplx z : r) CHECK(std::abs(z * z * z * z - cplx(16.0)) < 1e-12);
}

TEST_CASE("pure powers solved exactly at high degree") {
    // Aberth's symmetric start stalls on z^d - 1 for large d; the exact path
    // must take over.
    Poly p(512, cplx(0.0));
    p[0] = cplx(-1.0);
    p[511] = cplx(1.0);
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 511);
    for (cplx r : roots) {
        CHECK(std::isfinite(r.real()));
        CHECK(std::abs(std::abs(r) - 1.0) < 1e-12);
    }
}

TEST_CASE("origin roots stripped before the pure-power check") {
    // z^9 - z = z (z^8 - 1): after stripping the origin the remainder is a
    // pure power again.
    Poly p(10, cplx(0.0));
    p[1] = cplx(-1.0);
    p[9] = cplx(1.0);
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 9);
    CHECK(min_dist_to(roots, cplx(0.0)) < 1e-14);
    for (int j = 0; j < 8; ++j) {
        double t = 2.0 * std::numbers::pi_v<double> * j / 8.0;
        CHECK(min_dist_to(roots, cplx(std::cos(t), std::sin(t))) < 1e-10);
    }
}

TEST_CASE("cluster_roots merges a double root and keeps simple ones apart") {
    std::vector<cplx> raw = {cplx(1.0, 1e-9), cplx(1.0, -1e-9), cplx(-2.0)};
    auto clusters = cluster_roots(raw, 1e-7);
    REQUIRE(clusters.size() == 2);
    bool found_double = false, found_simple = false;
    for (const auto& c : clusters) {
        if (c.multiplicity == 2) {
            found_double = true;
            CHECK(std::abs(c.value - cplx(1.0)) < 1e-8);
        }
        if (c.multiplicity == 1) {
            found_simple = true;
            CHECK(std::abs(c.value - cplx(-2.0)) < 1e-12);
        }
    }
    CHECK(found_double);
    CHECK(found_simple);
}
