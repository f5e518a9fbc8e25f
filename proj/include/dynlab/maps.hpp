#pragma once

#include <string>
#include <vector>

#include "dynlab/domain.hpp"
#include "dynlab/poly.hpp"

namespace dynlab {

enum class Family { Poly1D, Skew2D, ProductPower2D, Poly2DTriangularizable };

// One self-map from the supported families, plus its reference domain V.
//   Poly1D:                  f(z)       = p(z)
//   Skew2D:                  f(z1, z2)  = (lambda*z1 + P(z2), Q(z2))
//   ProductPower2D parallel: f(z, w)    = (z^d, w^d)
//   ProductPower2D swapped:  f(z, w)    = (w^d, 2z)
//   Poly2DTriangularizable:  f(z1, z2)  = (S(z2), T(z1))
struct MapSpec {
    Family family = Family::Poly1D;
    int k = 1;
    int dt = 0;  // topological degree, derived at parse time

    Poly p;           // Poly1D
    cplx lambda{};    // Skew2D
    Poly P, Q;        // Skew2D
    int power = 0;    // ProductPower2D
    bool swapped = false;
    Poly S, T;        // Poly2DTriangularizable

    Domain domain;
    bool has_domain = false;
};

std::string family_name(Family f);

// Strict JSON schema: unknown keys anywhere are rejected; derived fields
// (dimension consistency, d_t >= 2) are checked. parse(serialize(m))
// reproduces m exactly and serialize(parse(s)) == s for canonical s.
MapSpec parse_map_spec(const std::string& json_text);
std::string serialize_map_spec(const MapSpec& m);

Point eval(const MapSpec& m, const Point& z);
Point eval_n(const MapSpec& m, const Point& z, int n);
Mat2 jacobian(const MapSpec& m, const Point& z);

// d_t^n as a checked 64-bit integer; throws ConfigError if it exceeds cap
long long degree_pow(const MapSpec& m, int n, long long cap);

// Zero set of det Df: isolated points for k == 1, coordinate-aligned complex
// lines {z_fixed_coord = value} for the supported 2D families.
struct CriticalLine {
    int fixed_coord = 0;
    cplx value{};
};
struct CriticalSet {
    std::vector<cplx> points;        // k == 1
    std::vector<CriticalLine> lines; // k == 2
};
CriticalSet critical_set(const MapSpec& m);

struct LojasiewiczFit {
    double lambda = 0.0;  // |f(z)| >= lambda * |z|^ell for large |z| (fitted)
    double ell = 0.0;
};

struct ValidationSample {
    Point z;              // boundary sample on dV
    double fiber_radius;  // max radial extent of its preimages
    double margin;        // min boundary margin of its preimages
};

struct ValidationReport {
    bool is_polynomial_like = false;
    double max_preimage_radius = 0.0;
    double margin = 0.0;           // min over samples; >= required_margin to pass
    double required_margin = 0.0;
    LojasiewiczFit lojasiewicz_estimate;
    std::vector<ValidationSample> samples;
};

// Samples >= 16 points of dV, solves the full fiber over each, and checks the
// preimages stay inside V by the required margin (default 1% of V's outer
// radius). Also fits the large-|z| growth law on spheres outside V.
ValidationReport validate_polynomial_like(const MapSpec& m, const Domain& V,
                                          int boundary_samples = 64,
                                          double margin_fraction = 0.01);

// Geometric radius scan R in {2, 4, ..., 1024} for families with a natural
// centered domain (Poly1D: disc, Skew2D: polydisc); first validated radius
// wins. Other families require an explicit domain.
Domain auto_domain(const MapSpec& m);

// Resolved domain: explicit if present, else auto_domain.
Domain resolve_domain(const MapSpec& m);

// Graph linearization for Skew2D with |lambda| > 1: the attracting invariant
// graph z1 = h(z2) over the base invariant set, evaluated as a truncated
// series with a certified tail bound. Requires |lambda| > 1.
struct GraphValue {
    cplx value{};
    double tail_bound = 0.0;
    int terms = 0;
};
GraphValue analytic_graph(const MapSpec& m, cplx z2, int terms = -1, double tol = 1e-10);

// Truncation depth that certifies a tail below tol.
int graph_truncation_terms(const MapSpec& m, double tol = 1e-10);

}  // namespace dynlab
