#include "dynlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "dynlab/preimage.hpp"
#include "dynlab/roots.hpp"
#include "dynlab/stats.hpp"

namespace dynlab {

namespace {

using njson = nlohmann::ordered_json;

void check_keys(const njson& j, const std::set<std::string>& allowed, const char* ctx) {
    if (!j.is_object()) throw ConfigError(std::string(ctx) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string(ctx) + ": unknown key \"" + it.key() + "\"");
}

cplx parse_cplx(const njson& j, const char* ctx) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(ctx) + ": expected [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

Poly parse_poly(const njson& j, const char* ctx) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(ctx) + ": expected a nonempty coefficient array");
    Poly p;
    for (const auto& c : j) p.push_back(parse_cplx(c, ctx));
    return trim(std::move(p));
}

njson cplx_json(cplx z) { return njson::array({z.real(), z.imag()}); }

njson poly_json(const Poly& p) {
    njson a = njson::array();
    for (const cplx& c : p) a.push_back(cplx_json(c));
    return a;
}

Domain parse_domain(const njson& j, int k) {
    check_keys(j, {"shape", "center", "radii"}, "domain");
    if (!j.contains("shape") || !j.contains("radii"))
        throw ConfigError("domain: needs shape and radii");
    Domain d;
    d.k = k;
    std::string s = j["shape"].get<std::string>();
    if (s == "Ball")
        d.shape = Shape::Ball;
    else if (s == "Polydisc")
        d.shape = Shape::Polydisc;
    else if (s == "Annulus2D")
        d.shape = Shape::Annulus2D;
    else
        throw ConfigError("domain: unknown shape \"" + s + "\"");
    if (j.contains("center")) {
        const njson& c = j["center"];
        if (!c.is_array() || c.size() != static_cast<size_t>(k))
            throw ConfigError("domain: center needs one [re, im] pair per coordinate");
        for (int i = 0; i < k; ++i) d.center.c[i] = parse_cplx(c[i], "domain.center");
    }
    for (const auto& r : j["radii"]) {
        if (!r.is_number()) throw ConfigError("domain: radii must be numbers");
        d.radii.push_back(r.get<double>());
    }
    d.check();
    return d;
}

njson domain_json(const Domain& d) {
    njson j;
    switch (d.shape) {
        case Shape::Ball: j["shape"] = "Ball"; break;
        case Shape::Polydisc: j["shape"] = "Polydisc"; break;
        case Shape::Annulus2D: j["shape"] = "Annulus2D"; break;
    }
    njson c = njson::array();
    for (int i = 0; i < d.k; ++i) c.push_back(cplx_json(d.center.c[i]));
    j["center"] = c;
    j["radii"] = d.radii;
    return j;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Poly1D: return "Poly1D";
        case Family::Skew2D: return "Skew2D";
        case Family::ProductPower2D: return "ProductPower2D";
        case Family::Poly2DTriangularizable: return "Poly2DTriangularizable";
    }
    return "?";
}

MapSpec parse_map_spec(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("map spec: invalid JSON: ") + e.what());
    }

    MapSpec m;
    if (!j.contains("family") || !j["family"].is_string())
        throw ConfigError("map spec: missing family");
    std::string fam = j["family"].get<std::string>();
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw ConfigError("map spec: missing integer dimension");
    m.k = j["dimension"].get<int>();

    if (fam == "Poly1D") {
        m.family = Family::Poly1D;
        check_keys(j, {"family", "dimension", "coeffs", "domain"}, "map spec");
        if (m.k != 1) throw ConfigError("map spec: Poly1D requires dimension 1");
        if (!j.contains("coeffs")) throw ConfigError("map spec: Poly1D needs coeffs");
        m.p = parse_poly(j["coeffs"], "coeffs");
        m.dt = degree(m.p);
    } else if (fam == "Skew2D") {
        m.family = Family::Skew2D;
        check_keys(j, {"family", "dimension", "lambda", "P", "Q", "domain"}, "map spec");
        if (m.k != 2) throw ConfigError("map spec: Skew2D requires dimension 2");
        if (!j.contains("lambda") || !j.contains("P") || !j.contains("Q"))
            throw ConfigError("map spec: Skew2D needs lambda, P, Q");
        m.lambda = parse_cplx(j["lambda"], "lambda");
        if (m.lambda == cplx(0.0)) throw ConfigError("map spec: Skew2D needs lambda != 0");
        m.P = parse_poly(j["P"], "P");
        m.Q = parse_poly(j["Q"], "Q");
        m.dt = degree(m.Q);
    } else if (fam == "ProductPower2D") {
        m.family = Family::ProductPower2D;
        check_keys(j, {"family", "dimension", "power", "variant", "domain"}, "map spec");
        if (m.k != 2) throw ConfigError("map spec: ProductPower2D requires dimension 2");
        if (!j.contains("power") || !j["power"].is_number_integer())
            throw ConfigError("map spec: ProductPower2D needs integer power");
        m.power = j["power"].get<int>();
        if (m.power < 2) throw ConfigError("map spec: ProductPower2D needs power >= 2");
        std::string v = j.value("variant", "parallel");
        if (v == "parallel")
            m.swapped = false;
        else if (v == "swapped")
            m.swapped = true;
        else
            throw ConfigError("map spec: variant must be \"parallel\" or \"swapped\"");
        m.dt = m.swapped ? m.power : m.power * m.power;
    } else if (fam == "Poly2DTriangularizable") {
        m.family = Family::Poly2DTriangularizable;
        check_keys(j, {"family", "dimension", "S", "T", "domain"}, "map spec");
        if (m.k != 2) throw ConfigError("map spec: Poly2DTriangularizable requires dimension 2");
        if (!j.contains("S") || !j.contains("T"))
            throw ConfigError("map spec: Poly2DTriangularizable needs S and T");
        m.S = parse_poly(j["S"], "S");
        m.T = parse_poly(j["T"], "T");
        if (degree(m.S) < 1 || degree(m.T) < 1)
            throw ConfigError("map spec: S and T need degree >= 1");
        m.dt = degree(m.S) * degree(m.T);
    } else {
        throw ConfigError("map spec: unknown family \"" + fam + "\"");
    }

    if (m.dt < 2) throw ConfigError("map spec: topological degree must be >= 2");

    if (j.contains("domain")) {
        m.domain = parse_domain(j["domain"], m.k);
        m.has_domain = true;
    }
    return m;
}

std::string serialize_map_spec(const MapSpec& m) {
    njson j;
    j["family"] = family_name(m.family);
    j["dimension"] = m.k;
    switch (m.family) {
        case Family::Poly1D:
            j["coeffs"] = poly_json(m.p);
            break;
        case Family::Skew2D:
            j["lambda"] = cplx_json(m.lambda);
            j["P"] = poly_json(m.P);
            j["Q"] = poly_json(m.Q);
            break;
        case Family::ProductPower2D:
            j["power"] = m.power;
            j["variant"] = m.swapped ? "swapped" : "parallel";
            break;
        case Family::Poly2DTriangularizable:
            j["S"] = poly_json(m.S);
            j["T"] = poly_json(m.T);
            break;
    }
    if (m.has_domain) j["domain"] = domain_json(m.domain);
    return j.dump(2) + "\n";
}

Point eval(const MapSpec& m, const Point& z) {
    switch (m.family) {
        case Family::Poly1D:
            return Point(horner(m.p, z.c[0]));
        case Family::Skew2D:
            return Point(m.lambda * z.c[0] + horner(m.P, z.c[1]), horner(m.Q, z.c[1]));
        case Family::ProductPower2D:
            if (m.swapped) return Point(ipow(z.c[1], m.power), 2.0 * z.c[0]);
            return Point(ipow(z.c[0], m.power), ipow(z.c[1], m.power));
        case Family::Poly2DTriangularizable:
            return Point(horner(m.S, z.c[1]), horner(m.T, z.c[0]));
    }
    return z;
}

Point eval_n(const MapSpec& m, const Point& z, int n) {
    Point y = z;
    for (int i = 0; i < n; ++i) y = eval(m, y);
    return y;
}

Mat2 jacobian(const MapSpec& m, const Point& z) {
    Mat2 J;
    J.k = m.k;
    switch (m.family) {
        case Family::Poly1D:
            J.a[0][0] = horner(derivative(m.p), z.c[0]);
            break;
        case Family::Skew2D:
            J.a[0][0] = m.lambda;
            J.a[0][1] = horner(derivative(m.P), z.c[1]);
            J.a[1][0] = 0.0;
            J.a[1][1] = horner(derivative(m.Q), z.c[1]);
            break;
        case Family::ProductPower2D: {
            cplx dz = static_cast<double>(m.power) * ipow(z.c[0], m.power - 1);
            cplx dw = static_cast<double>(m.power) * ipow(z.c[1], m.power - 1);
            if (m.swapped) {
                J.a[0][1] = dw;
                J.a[1][0] = 2.0;
            } else {
                J.a[0][0] = dz;
                J.a[1][1] = dw;
            }
            break;
        }
        case Family::Poly2DTriangularizable:
            J.a[0][1] = horner(derivative(m.S), z.c[1]);
            J.a[1][0] = horner(derivative(m.T), z.c[0]);
            break;
    }
    return J;
}

long long degree_pow(const MapSpec& m, int n, long long cap) {
    long long v = 1;
    for (int i = 0; i < n; ++i) {
        if (v > cap / m.dt)
            throw ConfigError("degree_pow: d_t^n exceeds cap " + fmt_int(cap));
        v *= m.dt;
    }
    return v;
}

CriticalSet critical_set(const MapSpec& m) {
    CriticalSet cs;
    auto roots_of_derivative = [](const Poly& q) {
        Poly dq = derivative(q);
        std::vector<cplx> out;
        if (degree(dq) >= 1) {
            auto cl = cluster_roots(poly_roots(dq), 1e-9);
            for (const auto& c : cl) out.push_back(c.value);
        }
        return out;
    };
    switch (m.family) {
        case Family::Poly1D:
            cs.points = roots_of_derivative(m.p);
            break;
        case Family::Skew2D:
            for (cplx v : roots_of_derivative(m.Q)) cs.lines.push_back({1, v});
            break;
        case Family::ProductPower2D:
            if (m.power >= 2) {
                if (!m.swapped) cs.lines.push_back({0, cplx(0.0)});
                cs.lines.push_back({1, cplx(0.0)});
            }
            break;
        case Family::Poly2DTriangularizable:
            for (cplx v : roots_of_derivative(m.T)) cs.lines.push_back({0, v});
            for (cplx v : roots_of_derivative(m.S)) cs.lines.push_back({1, v});
            break;
    }
    return cs;
}

ValidationReport validate_polynomial_like(const MapSpec& m, const Domain& V,
                                          int boundary_samples, double margin_fraction) {
    V.check();
    if (V.k != m.k) throw ConfigError("validate: domain dimension mismatch");
    if (boundary_samples < 16)
        throw ConfigError("validate: need at least 16 boundary samples");

    ValidationReport rep;
    double outer = V.outer_radius();
    rep.required_margin = margin_fraction * outer;
    rep.margin = 1e300;
    Rng rng = Rng::stream(0x5eedu, {0xb0d1, static_cast<uint64_t>(boundary_samples)});

    for (int i = 0; i < boundary_samples; ++i) {
        Point z = V.boundary_point(i, boundary_samples, rng);
        PreimageSet f = fiber(m, z);
        ValidationSample s;
        s.z = z;
        s.fiber_radius = 0.0;
        s.margin = 1e300;
        for (const auto& w : f.points) {
            double mg = V.boundary_margin(w.w);
            s.margin = std::min(s.margin, mg);
            s.fiber_radius = std::max(s.fiber_radius, outer - mg);
        }
        rep.samples.push_back(s);
        rep.margin = std::min(rep.margin, s.margin);
        rep.max_preimage_radius = std::max(rep.max_preimage_radius, s.fiber_radius);
    }
    rep.is_polynomial_like = rep.margin >= rep.required_margin;

    // growth law on spheres well outside V: min |f| per shell, log-log fit
    std::vector<double> lx, ly;
    for (int shell = 1; shell <= 4; ++shell) {
        double r = outer * std::pow(2.0, shell);
        double mn = 1e300;
        for (int s = 0; s < 128; ++s) {
            Point z;
            double n2 = 0.0;
            double g[4] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            int comps = 2 * m.k;
            for (int c = 0; c < comps; ++c) n2 += g[c] * g[c];
            double sc = r / std::sqrt(n2);
            z.c[0] = cplx(g[0] * sc, g[1] * sc);
            if (m.k == 2) z.c[1] = cplx(g[2] * sc, g[3] * sc);
            mn = std::min(mn, norm_of(eval(m, z), m.k));
        }
        if (mn > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(mn));
        }
    }
    LinFit fit = linear_fit(lx, ly);
    rep.lojasiewicz_estimate.ell = fit.slope;
    rep.lojasiewicz_estimate.lambda = std::exp(fit.intercept);
    return rep;
}

Domain auto_domain(const MapSpec& m) {
    if (m.family != Family::Poly1D && m.family != Family::Skew2D)
        throw ConfigError("auto_domain: family requires an explicit domain");
    for (double R = 2.0; R <= 1024.0; R *= 2.0) {
        Domain d;
        d.k = m.k;
        if (m.k == 1) {
            d.shape = Shape::Ball;
            d.radii = {R};
        } else {
            d.shape = Shape::Polydisc;
            d.radii = {R, R};
        }
        try {
            ValidationReport rep = validate_polynomial_like(m, d, 32);
            if (rep.is_polynomial_like) return d;
        } catch (const NumericalError&) {
            // fiber solve failed at this radius; try the next one
        }
    }
    throw ConfigError("auto_domain: no radius in [2, 1024] validates; supply a domain");
}

Domain resolve_domain(const MapSpec& m) {
    if (m.has_domain) return m.domain;
    return auto_domain(m);
}

int graph_truncation_terms(const MapSpec& m, double tol) {
    if (m.family != Family::Skew2D) throw ConfigError("analytic_graph: Skew2D only");
    double L = std::abs(m.lambda);
    if (L <= 1.0) throw ConfigError("analytic_graph: requires |lambda| > 1");
    double supP = sup_on_disc(m.P, cauchy_radius(m.Q));
    if (supP == 0.0) return 1;
    double n = std::log(supP / (tol * (L - 1.0))) / std::log(L);
    return std::clamp(static_cast<int>(std::ceil(n)), 1, 400);
}

GraphValue analytic_graph(const MapSpec& m, cplx z2, int terms, double tol) {
    if (terms < 0) terms = graph_truncation_terms(m, tol);
    double L = std::abs(m.lambda);
    if (m.family != Family::Skew2D || L <= 1.0)
        throw ConfigError("analytic_graph: requires Skew2D with |lambda| > 1");
    double rK = cauchy_radius(m.Q);
    double supP = sup_on_disc(m.P, rK);

    GraphValue g;
    g.terms = terms;
    g.tail_bound = supP * std::pow(L, -terms) / (L - 1.0);
    cplx y = z2, s = 0.0, lam_pow = 1.0;
    for (int j = 1; j <= terms; ++j) {
        lam_pow /= m.lambda;
        s += lam_pow * horner(m.P, y);
        y = horner(m.Q, y);
        if (std::abs(y) > 2.0 * rK + 1.0)
            throw NumericalError("analytic_graph: base point escapes the invariant set");
    }
    g.value = -s;
    return g;
}

}  // namespace dynlab
