#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dynlab/preimage.hpp"
#include "dynlab/rng.hpp"
#include "helpers.hpp"

using namespace dynlab;
using helpers::load_map;

static const std::vector<std::string> kMaps = {"doubling", "chebyshev", "skew",
                                               "skew_p0",  "torus",     "wd2z"};

TEST_CASE("fiber count law: total multiplicity is exactly d_t") {
    Rng rng = Rng::stream(17, {1});
    for (const auto& name : kMaps) {
        MapSpec m = load_map(name);
        for (int trial = 0; trial < 8; ++trial) {
            Point z(cplx(rng.normal(), rng.normal()) * 0.4,
                    cplx(rng.normal(), rng.normal()) * 0.4);
            PreimageSet s = fiber(m, z);
            CHECK(s.total == m.dt);
            long long acc = 0;
            for (const auto& p : s.points) {
                acc += p.multiplicity;
                CHECK(dist(eval(m, p.w), z, m.k) < 1e-8 * (1.0 + norm_of(z, m.k)));
            }
            CHECK(acc == s.total);
        }
    }
}

TEST_CASE("critical values carry merged multiplicity") {
    // 0 has the single preimage 0 under z^2, with multiplicity 2
    MapSpec m = load_map("doubling");
    PreimageSet s = fiber(m, Point(cplx(0.0)));
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].multiplicity == 2);
    CHECK(std::abs(s.points[0].w.c[0]) < 1e-12);
}

TEST_CASE("doubling fiber is the exact square roots") {
    MapSpec m = load_map("doubling");
    PreimageSet s = fiber(m, Point(cplx(-4.0)));
    REQUIRE(s.points.size() == 2);
    for (const auto& p : s.points)
        CHECK(std::abs(p.w.c[0] * p.w.c[0] + 4.0) < 1e-10);
}

TEST_CASE("iterated fiber multiplies counts and respects the cap") {
    MapSpec m = load_map("torus");
    Point z(cplx(1.0, 0.3), cplx(-0.7, 0.2));
    PreimageSet s = iterated_fiber(m, z, 3);
    CHECK(s.order == 3);
    CHECK(s.total == 64);  // 4^3
    for (const auto& p : s.points)
        CHECK(dist(eval_n(m, p.w, 3), z, 2) < 1e-7 * (1.0 + norm_of(z, 2)));
    CHECK_THROWS_AS(iterated_fiber(m, z, 3, 50), ConfigError);
}

TEST_CASE("swapped product map: fiber solves both coordinates") {
    // (z, w) -> (w^3, 2z): preimage of (a, b) is z = b/2, w = a^(1/3)
    MapSpec m = load_map("wd2z");
    Point z(cplx(0.125), cplx(0.5));
    PreimageSet s = fiber(m, z);
    CHECK(s.total == 3);
    for (const auto& p : s.points) {
        CHECK(std::abs(p.w.c[0] - 0.25) < 1e-10);
        CHECK(std::abs(p.w.c[1] * p.w.c[1] * p.w.c[1] - 0.125) < 1e-10);
    }
}

TEST_CASE("random_preimage matches fiber multiplicities in law") {
    MapSpec m = load_map("doubling");
    Point z(cplx(0.7, 0.2));
    PreimageSet s = fiber(m, z);
    REQUIRE(s.points.size() == 2);
    Rng rng = Rng::stream(23, {5});
    std::map<int, int> hits;  // nearest fiber point index -> count
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) {
        Point w = random_preimage(m, z, rng);
        int best = 0;
        double bd = 1e300;
        for (size_t j = 0; j < s.points.size(); ++j) {
            double d = dist(w, s.points[j].w, 1);
            if (d < bd) { bd = d; best = static_cast<int>(j); }
        }
        CHECK(bd < 1e-8);
        ++hits[best];
    }
    // equal multiplicities: expect a fair coin, 4000 draws, 5 sigma band
    for (auto& [idx, n] : hits)
        CHECK(std::abs(n - draws / 2) < 5.0 * std::sqrt(draws * 0.25));
}

TEST_CASE("random_preimage is reproducible per stream") {
    MapSpec m = load_map("skew");
    Point z(cplx(0.4, -0.1), cplx(0.2, 0.3));
    Rng a = Rng::stream(9, {2, 7});
    Rng b = Rng::stream(9, {2, 7});
    for (int i = 0; i < 32; ++i) {
        Point wa = random_preimage(m, z, a);
        Point wb = random_preimage(m, z, b);
        CHECK(wa.c[0] == wb.c[0]);
        CHECK(wa.c[1] == wb.c[1]);
    }
}
