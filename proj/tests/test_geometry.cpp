#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dynlab/geometry.hpp"
#include "helpers.hpp"

using namespace dynlab;
using helpers::load_map;

TEST_CASE("algebraic degrees of the shipped maps") {
    CHECK(algebraic_degree(load_map("doubling")) == 2);
    CHECK(algebraic_degree(load_map("chebyshev")) == 2);
    CHECK(algebraic_degree(load_map("skew")) == 2);
    CHECK(algebraic_degree(load_map("torus")) == 2);
    CHECK(algebraic_degree(load_map("wd2z")) == 3);
}

TEST_CASE("torus level 0, l = 1: exact integral with zero variance") {
    // Df^0 = id so the integrand is the constant 2; the exact proposal region
    // equals the integration region, giving 2 * vol(V) = 4.5 pi^2 with every
    // sample accepted
    MapSpec m = load_map("torus");
    Domain V = resolve_domain(m);
    auto [v, se] = degree_estimate(m, V, 1, 0, 20000, 5);
    double pi = std::numbers::pi_v<double>;
    CHECK(std::abs(v - 4.5 * pi * pi) < 1e-9);
    CHECK(se == 0.0);
}

TEST_CASE("degree growth of the doubling map stays at log d_t") {
    MapSpec m = load_map("doubling");
    DegreeTable t = degree_table(m, resolve_domain(m), 1, 6, 20000, 5);
    CHECK_FALSE(t.truncated);
    REQUIRE(t.rows.size() == 7);
    CHECK(t.growth_rate > 0.5);
    CHECK(t.growth_rate <= std::log(2.0) + 0.1);
    for (const auto& r : t.rows) {
        CHECK(r.estimate > 0.0);
        CHECK(r.survivors > 0);
        CHECK(r.samples == 20000);
    }
}

TEST_CASE("acceptance floor truncates the table with a reason") {
    MapSpec m = load_map("doubling");
    Domain V = resolve_domain(m);
    // level-n acceptance for z^2 on the disc of radius 4 is about
    // pi R_n^2 / (16 pi) with R_n -> 1, crossing 0.2 already at n = 1
    DegreeTable t = degree_table(m, V, 0, 12, 20000, 5, 1, 0.2);
    CHECK(t.truncated);
    CHECK(t.rows.size() == 1);
    CHECK_FALSE(t.truncation_reason.empty());
    CHECK_THROWS_AS(degree_estimate(m, V, 0, 5, 20000, 5, 1, 0.2), NumericalError);
}

TEST_CASE("degree_table rejects a bad form power") {
    MapSpec m = load_map("doubling");
    CHECK_THROWS_AS(degree_table(m, resolve_domain(m), 2, 4, 1000, 1), ConfigError);
}

TEST_CASE("degree_table is independent of the worker count") {
    MapSpec m = load_map("torus");
    Domain V = resolve_domain(m);
    DegreeTable a = degree_table(m, V, 1, 4, 150000, 9, 1);
    DegreeTable b = degree_table(m, V, 1, 4, 150000, 9, 4);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].estimate == b.rows[i].estimate);
        CHECK(a.rows[i].se == b.rows[i].se);
        CHECK(a.rows[i].survivors == b.rows[i].survivors);
    }
}

TEST_CASE("critical lines missing the domain carry zero mass") {
    // the torus domain keeps both coordinates away from 0, where the critical
    // lines sit
    MapSpec m = load_map("torus");
    CriticalMassSeries s = critical_volume(m, resolve_domain(m), 4, 20000, 5);
    REQUIRE(s.rows.size() == 5);
    for (const auto& r : s.rows) CHECK(r.value == 0.0);
    CHECK(s.total == 0.0);
    CHECK_FALSE(s.series_divergent);
}

TEST_CASE("skew critical mass decays geometrically") {
    MapSpec m = load_map("skew");
    CriticalMassSeries s = critical_volume(m, resolve_domain(m), 5, 20000, 5);
    REQUIRE(s.rows.size() == 6);
    CHECK(s.rows[0].value > 0.1);
    CHECK(s.rows[1].value < s.rows[0].value);
    CHECK(s.fitted_ratio > 0.0);
    CHECK(s.fitted_ratio < 1.0);
    CHECK_FALSE(s.series_divergent);
    CHECK(s.total > 0.0);
}

TEST_CASE("critical_volume is restricted to 2D maps") {
    MapSpec m = load_map("doubling");
    CHECK_THROWS_AS(critical_volume(m, resolve_domain(m), 4, 1000, 1), ConfigError);
}

TEST_CASE("volume-decay exponent: applicable for the torus map") {
    // alpha = algebraic degree / d_t = 2/4; the normalized l = 1 integrals
    // decay at least that fast (measured ratio is 1/4)
    MapSpec m = load_map("torus");
    PlbReport rep = plb_decay(m, resolve_domain(m), 5, 20000, 5);
    CHECK(rep.algebraic_degree == 2);
    CHECK(rep.alpha == 0.5);
    CHECK(rep.alpha_applicable);
    REQUIRE(rep.series.rows.size() == 6);
    for (size_t i = 1; i < rep.series.rows.size(); ++i)
        CHECK(rep.series.rows[i].v < rep.series.rows[i - 1].v);
    CHECK(rep.series.fitted_rate > 0.0);
    CHECK(rep.series.fitted_rate < rep.alpha + 0.05);
}

TEST_CASE("volume-decay exponent: vacuous when d_t does not dominate") {
    // d_t = 3 equals the algebraic degree, so alpha = 1 certifies nothing
    MapSpec m = load_map("wd2z");
    PlbReport rep = plb_decay(m, resolve_domain(m), 5, 20000, 5);
    CHECK(rep.algebraic_degree == 3);
    CHECK(rep.alpha == 1.0);
    CHECK_FALSE(rep.alpha_applicable);
}
