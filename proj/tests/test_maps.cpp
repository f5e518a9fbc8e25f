#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dynlab/maps.hpp"
#include "dynlab/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dynlab;
using helpers::load_map;

static const std::vector<std::string> kMaps = {"doubling", "chebyshev", "skew",
                                               "skew_p0",  "torus",     "wd2z"};

TEST_CASE("serialize/parse round trip on every shipped config") {
    for (const auto& name : kMaps) {
        MapSpec m = load_map(name);
        std::string canon = serialize_map_spec(m);
        MapSpec m2 = parse_map_spec(canon);
        CHECK(serialize_map_spec(m2) == canon);
        CHECK(m2.family == m.family);
        CHECK(m2.k == m.k);
        CHECK(m2.dt == m.dt);
        CHECK(m2.has_domain == m.has_domain);
    }
}

TEST_CASE("topological degrees of the shipped maps") {
    CHECK(load_map("doubling").dt == 2);
    CHECK(load_map("chebyshev").dt == 2);
    CHECK(load_map("skew").dt == 2);
    CHECK(load_map("skew_p0").dt == 2);
    CHECK(load_map("torus").dt == 4);
    CHECK(load_map("wd2z").dt == 3);
}

TEST_CASE("strict parsing rejects malformed specs") {
    std::string good = helpers::read_file(helpers::config_path("doubling"));
    CHECK_THROWS_AS(parse_map_spec("{\"family\":\"Poly1D\"}"), ConfigError);
    // unknown key
    std::string bad = good;
    bad.insert(bad.find('{') + 1, "\"surprise\": 1,");
    CHECK_THROWS_AS(parse_map_spec(bad), ConfigError);
    // degree-1 polynomial is not an admissible map
    CHECK_THROWS_AS(
        parse_map_spec("{\"family\":\"Poly1D\",\"dimension\":1,"
                       "\"coeffs\":[[0.0,0.0],[1.0,0.0]]}"),
        ConfigError);
    CHECK_THROWS_AS(parse_map_spec("not json"), ConfigError);
}

TEST_CASE("eval matches the defining formulas") {
    Point z(cplx(0.3, 0.4), cplx(-0.2, 0.1));
    {
        MapSpec m = load_map("doubling");
        CHECK(std::abs(eval(m, z).c[0] - z.c[0] * z.c[0]) < 1e-15);
    }
    {
        MapSpec m = load_map("chebyshev");
        CHECK(std::abs(eval(m, z).c[0] - (z.c[0] * z.c[0] - 2.0)) < 1e-15);
    }
    {
        MapSpec m = load_map("skew");
        Point w = eval(m, z);
        CHECK(std::abs(w.c[0] - (4.0 * z.c[0] + z.c[1] * z.c[1])) < 1e-15);
        CHECK(std::abs(w.c[1] - z.c[1] * z.c[1]) < 1e-15);
    }
    {
        MapSpec m = load_map("torus");
        Point w = eval(m, z);
        CHECK(std::abs(w.c[0] - z.c[0] * z.c[0]) < 1e-15);
        CHECK(std::abs(w.c[1] - z.c[1] * z.c[1]) < 1e-15);
    }
    {
        MapSpec m = load_map("wd2z");
        Point w = eval(m, z);
        CHECK(std::abs(w.c[0] - z.c[1] * z.c[1] * z.c[1]) < 1e-15);
        CHECK(std::abs(w.c[1] - 2.0 * z.c[0]) < 1e-15);
    }
}

TEST_CASE("eval_n is iterated eval") {
    for (const auto& name : kMaps) {
        MapSpec m = load_map(name);
        Point z(cplx(0.21, -0.13), cplx(0.05, 0.32));
        Point by_hand = z;
        for (int i = 0; i < 4; ++i) by_hand = eval(m, by_hand);
        Point direct = eval_n(m, z, 4);
        CHECK(dist(by_hand, direct, m.k) < 1e-12);
    }
}

TEST_CASE("jacobian matches finite differences on every family") {
    Rng rng = Rng::stream(5, {4});
    for (const auto& name : kMaps) {
        MapSpec m = load_map(name);
        for (int trial = 0; trial < 5; ++trial) {
            Point z(cplx(rng.normal(), rng.normal()) * 0.5,
                    cplx(rng.normal(), rng.normal()) * 0.5 + 1.0);
            Mat2 J = jacobian(m, z);
            cplx fd[2][2];
            oracles::fd_jacobian(m, z, fd);
            for (int r = 0; r < m.k; ++r)
                for (int c = 0; c < m.k; ++c)
                    CHECK(std::abs(J.a[r][c] - fd[r][c]) < 1e-6 * (1.0 + std::abs(fd[r][c])));
        }
    }
}

TEST_CASE("degree_pow is exact and capped") {
    MapSpec torus = load_map("torus");
    CHECK(degree_pow(torus, 0, 1000000) == 1);
    CHECK(degree_pow(torus, 3, 1000000) == 64);
    CHECK(degree_pow(torus, 9, 1000000) == 262144);
    CHECK_THROWS_AS(degree_pow(torus, 20, 1000000), ConfigError);
}

TEST_CASE("critical sets of the shipped maps") {
    {
        auto cs = critical_set(load_map("doubling"));
        REQUIRE(cs.points.size() == 1);
        CHECK(std::abs(cs.points[0]) < 1e-14);
        CHECK(cs.lines.empty());
    }
    {
        // det Df = lambda * Q'(z2) vanishes exactly on {z2 = 0}
        auto cs = critical_set(load_map("skew"));
        REQUIRE(cs.lines.size() == 1);
        CHECK(cs.lines[0].fixed_coord == 1);
        CHECK(std::abs(cs.lines[0].value) < 1e-14);
    }
    {
        auto cs = critical_set(load_map("torus"));
        REQUIRE(cs.lines.size() == 2);
        CHECK(cs.lines[0].fixed_coord != cs.lines[1].fixed_coord);
        for (const auto& l : cs.lines) CHECK(std::abs(l.value) < 1e-14);
    }
    {
        // (w^3, 2z): only the w-derivative of the first coordinate degenerates
        auto cs = critical_set(load_map("wd2z"));
        REQUIRE(cs.lines.size() == 1);
        CHECK(cs.lines[0].fixed_coord == 1);
    }
}

TEST_CASE("validation accepts the shipped domains") {
    for (const auto& name : kMaps) {
        MapSpec m = load_map(name);
        auto rep = validate_polynomial_like(m, resolve_domain(m));
        CHECK(rep.is_polynomial_like);
        CHECK(rep.margin >= rep.required_margin);
        CHECK(rep.samples.size() >= 16);
    }
}

TEST_CASE("validation rejects a map that escapes its domain") {
    // z^2 + 10 on the disc of radius 2: boundary preimages sit near |z| = 2.8
    MapSpec m = parse_map_spec(
        "{\"family\":\"Poly1D\",\"dimension\":1,"
        "\"coeffs\":[[10.0,0.0],[0.0,0.0],[1.0,0.0]],"
        "\"domain\":{\"shape\":\"Ball\",\"center\":[[0.0,0.0]],\"radii\":[2.0]}}");
    auto rep = validate_polynomial_like(m, resolve_domain(m));
    CHECK_FALSE(rep.is_polynomial_like);
    CHECK(rep.max_preimage_radius > 2.0);
}

TEST_CASE("auto_domain produces a validated disc for the doubling map") {
    MapSpec m = load_map("doubling");
    m.has_domain = false;
    Domain d = auto_domain(m);
    CHECK(d.k == 1);
    auto rep = validate_polynomial_like(m, d);
    CHECK(rep.is_polynomial_like);
}

TEST_CASE("invariant graph satisfies its functional equation") {
    // h(Q(w)) = lambda * h(w) + P(w) on the base invariant set
    MapSpec m = load_map("skew");
    int terms = graph_truncation_terms(m, 1e-12);
    CHECK(terms >= 1);
    for (int j = 0; j < 8; ++j) {
        double t = 2.0 * std::numbers::pi_v<double> * j / 8.0 + 0.1;
        cplx w(std::cos(t), std::sin(t));
        GraphValue lhs = analytic_graph(m, w * w, -1, 1e-12);
        GraphValue rhs = analytic_graph(m, w, -1, 1e-12);
        CHECK(lhs.tail_bound <= 1e-12);
        cplx residual = lhs.value - (m.lambda * rhs.value + horner(m.P, w));
        CHECK(std::abs(residual) < 1e-10);
    }
    // geometric-series anchor: P = Q = z^2, lambda = 4 gives h(1) = -1/3
    GraphValue at_one = analytic_graph(m, cplx(1.0), -1, 1e-12);
    CHECK(std::abs(at_one.value - cplx(-1.0 / 3.0)) < 1e-11);
    // P = 0 collapses the graph to the zero section
    MapSpec m0 = load_map("skew_p0");
    CHECK(std::abs(analytic_graph(m0, cplx(0.8, 0.1)).value) < 1e-12);
}
