#include "dynlab/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "dynlab/roots.hpp"
#include "dynlab/stats.hpp"

namespace dynlab {

namespace {

PointClass classify(const double mods[2], int k, double tol) {
    int above = 0, below = 0;
    for (int i = 0; i < k; ++i) {
        if (mods[i] >= 1.0 + tol)
            ++above;
        else if (mods[i] <= 1.0 - tol)
            ++below;
    }
    if (above == k) return PointClass::Repelling;
    if (below == k) return PointClass::Attracting;
    if (above + below == k && k == 2) return PointClass::Saddle;
    return PointClass::Neutral;
}

// derivative cocycle moduli along the n-orbit of x
void orbit_multipliers(const MapSpec& m, const Point& x, int n, double out[2]) {
    Mat2 J = Mat2::identity(m.k);
    Point y = x;
    for (int t = 0; t < n; ++t) {
        J = jacobian(m, y) * J;
        y = eval(m, y);
    }
    eigen_moduli(J, out);
}

void push_point(const MapSpec& m, PeriodicPointSet& s, const Point& z, long long mult,
                double tol_class, int n) {
    PeriodicPoint pp;
    pp.z = z;
    pp.multiplicity = mult;
    if (m.family == Family::Skew2D) {
        // triangular cocycle: the multipliers are exactly lambda^n and the
        // base-coordinate chain product
        cplx lam_n = ipow(m.lambda, n);
        cplx qc = 1.0;
        cplx y = z.c[1];
        Poly dQ = derivative(m.Q);
        for (int t = 0; t < n; ++t) {
            qc *= horner(dQ, y);
            y = horner(m.Q, y);
        }
        pp.mult_mod[0] = std::abs(lam_n);
        pp.mult_mod[1] = std::abs(qc);
        if (pp.mult_mod[0] < pp.mult_mod[1]) std::swap(pp.mult_mod[0], pp.mult_mod[1]);
    } else {
        orbit_multipliers(m, z, n, pp.mult_mod);
    }
    pp.cls = classify(pp.mult_mod, m.k, tol_class);
    s.points.push_back(pp);
    s.total += mult;
}

// fixed points of z -> q(z) via q(z) - z = 0
std::vector<ClusteredRoot> fixed_points_of(const Poly& q) {
    Poly g = q;
    if (g.size() < 2) g.resize(2, cplx(0.0));
    g[1] -= 1.0;
    g = trim(std::move(g));
    return cluster_roots(poly_roots(g), 1e-7);
}

bool newton_refine(const MapSpec& m, Point& z, int n, double outer) {
    for (int it = 0; it < 60; ++it) {
        Mat2 J = Mat2::identity(m.k);
        Point y = z;
        for (int t = 0; t < n; ++t) {
            J = jacobian(m, y) * J;
            y = eval(m, y);
        }
        cplx g0 = y.c[0] - z.c[0];
        cplx g1 = (m.k == 2) ? y.c[1] - z.c[1] : cplx(0.0);
        double res = std::sqrt(abs2(g0) + abs2(g1));
        if (res <= 1e-11 * (1.0 + norm_of(z, m.k))) return true;
        // solve (J - I) dz = -g
        if (m.k == 1) {
            cplx d = J.a[0][0] - 1.0;
            if (std::abs(d) < 1e-14) return false;
            z.c[0] -= g0 / d;
        } else {
            cplx a = J.a[0][0] - 1.0, b = J.a[0][1];
            cplx c = J.a[1][0], d = J.a[1][1] - 1.0;
            cplx dt2 = a * d - b * c;
            if (std::abs(dt2) < 1e-14) return false;
            z.c[0] -= (g0 * d - b * g1) / dt2;
            z.c[1] -= (a * g1 - g0 * c) / dt2;
        }
        if (norm_of(z, m.k) > 10.0 * (1.0 + outer)) return false;
    }
    return false;
}

}  // namespace

std::string point_class_name(PointClass c) {
    switch (c) {
        case PointClass::Repelling: return "repelling";
        case PointClass::Saddle: return "saddle";
        case PointClass::Attracting: return "attracting";
        case PointClass::Neutral: return "neutral";
    }
    return "?";
}

PeriodicPointSet periodic_points(const MapSpec& m, int n, const PeriodicOptions& opts) {
    if (n < 1) throw ConfigError("periodic_points: period must be >= 1");
    PeriodicPointSet s;
    s.period = n;
    s.expected = degree_pow(m, n, opts.count_cap);

    auto fits = [&](double deg_per_solve) {
        return deg_per_solve <= static_cast<double>(opts.direct_degree_cap);
    };
    double tol = opts.neutral_tol;

    switch (m.family) {
        case Family::Poly1D: {
            double dn = std::pow(static_cast<double>(m.dt), n);
            if (fits(dn)) {
                for (const auto& r : fixed_points_of(iterate_poly(m.p, n)))
                    push_point(m, s, Point(r.value), r.multiplicity, tol, n);
                s.exact = true;
            }
            break;
        }
        case Family::Skew2D: {
            double dn = std::pow(static_cast<double>(m.dt), n);
            if (fits(dn)) {
                cplx lam_n = ipow(m.lambda, n);
                if (std::abs(lam_n - cplx(1.0)) < 1e-9)
                    throw NumericalError("periodic_points: lambda^n too close to 1");
                for (const auto& r : fixed_points_of(iterate_poly(m.Q, n))) {
                    // z1 solves z1 = lambda^n z1 + sum_j lambda^(n-1-j) P(Q^j(z2))
                    cplx sum = 0.0;
                    cplx y = r.value;
                    for (int j = 0; j < n; ++j) {
                        sum += ipow(m.lambda, n - 1 - j) * horner(m.P, y);
                        y = horner(m.Q, y);
                    }
                    cplx z1 = sum / (cplx(1.0) - lam_n);
                    push_point(m, s, Point(z1, r.value), r.multiplicity, tol, n);
                }
                s.exact = true;
            }
            break;
        }
        case Family::ProductPower2D: {
            if (!m.swapped) {
                double per_coord = std::pow(static_cast<double>(m.power), n);
                if (per_coord <= 1e6 && s.expected <= opts.count_cap) {
                    // z^(d^n) = z: 0 and the (d^n - 1)-th roots of unity
                    long long q = 1;
                    for (int i = 0; i < n; ++i) q *= m.power;
                    std::vector<cplx> coord;
                    coord.reserve(static_cast<size_t>(q));
                    coord.push_back(cplx(0.0));
                    for (long long j = 0; j < q - 1; ++j) {
                        double t = 2.0 * std::numbers::pi_v<double> * static_cast<double>(j) /
                                   static_cast<double>(q - 1);
                        coord.emplace_back(std::cos(t), std::sin(t));
                    }
                    bool annulus = m.has_domain && m.domain.shape == Shape::Annulus2D;
                    for (cplx a : coord)
                        for (cplx b : coord) {
                            Point z(a, b);
                            if (annulus && !m.domain.contains(z)) continue;
                            push_point(m, s, z, 1, tol, n);
                        }
                    // still a full algebraic solve when the annulus filter
                    // drops off-domain solutions; only the count law is waived
                    s.exact = true;
                }
            } else {
                // handled below through the swap composition
            }
            if (!m.swapped) break;
            [[fallthrough]];
        }
        case Family::Poly2DTriangularizable: {
            Poly S = m.S, T = m.T;
            if (m.family == Family::ProductPower2D) {
                // (w^d, 2z) as a swapped pair: S(w) = w^d, T(z) = 2z
                S.assign(static_cast<size_t>(m.power) + 1, cplx(0.0));
                S[static_cast<size_t>(m.power)] = 1.0;
                T = {cplx(0.0), cplx(2.0)};
            }
            int ds = degree(S), dtt = degree(T);
            if (n % 2 == 0) {
                int h = n / 2;
                double per_coord = std::pow(static_cast<double>(ds) * dtt, h);
                if (fits(per_coord)) {
                    Poly A = compose(S, T);  // first coordinate of f^2
                    Poly B = compose(T, S);
                    Poly Ah{cplx(0.0), cplx(1.0)}, Bh = Ah;
                    for (int i = 0; i < h; ++i) {
                        Ah = compose(A, Ah);
                        Bh = compose(B, Bh);
                    }
                    auto r1 = fixed_points_of(Ah);
                    auto r2 = fixed_points_of(Bh);
                    for (const auto& a : r1)
                        for (const auto& b : r2)
                            push_point(m, s, Point(a.value, b.value),
                                       a.multiplicity * b.multiplicity, tol, n);
                    s.exact = true;
                }
            } else {
                // odd n: f^n = (C(z2), D(z1)); solve C(D(z1)) = z1, z2 = D(z1)
                double deg_cd = std::pow(static_cast<double>(ds) * dtt, n);
                if (fits(deg_cd)) {
                    Poly C = S, D = T;  // components of f^1
                    for (int i = 1; i < n; ++i) {
                        Poly C2 = compose(S, D);
                        Poly D2 = compose(T, C);
                        C = std::move(C2);
                        D = std::move(D2);
                    }
                    for (const auto& r : fixed_points_of(compose(C, D))) {
                        cplx z2 = horner(D, r.value);
                        push_point(m, s, Point(r.value, z2), r.multiplicity, tol, n);
                    }
                    s.exact = true;
                }
            }
            break;
        }
    }

    if (s.exact) {
        bool count_law = !(m.family == Family::ProductPower2D && m.has_domain &&
                           m.domain.shape == Shape::Annulus2D);
        if (count_law && s.total != s.expected)
            throw NumericalError("periodic_points: found " + fmt_int(s.total) +
                                 " with multiplicity, expected " + fmt_int(s.expected));
        return s;
    }

    // near-return fallback
    if (!opts.seeds)
        throw ConfigError("periodic_points: degree cap exceeded and no seed cloud given");
    const WeightedCloud& cloud = *opts.seeds;
    double outer = m.has_domain ? m.domain.outer_radius() : 4.0;
    std::vector<Point> found;
    for (const Point& x : cloud.points) {
        Point z = x;
        if (!newton_refine(m, z, n, outer)) continue;
        bool dup = false;
        for (const Point& w : found)
            if (dist(w, z, m.k) <= 1e-6 * (1.0 + norm_of(z, m.k))) { dup = true; break; }
        if (!dup) found.push_back(z);
    }
    std::sort(found.begin(), found.end(), [](const Point& a, const Point& b) {
        if (a.c[0].real() != b.c[0].real()) return a.c[0].real() < b.c[0].real();
        if (a.c[0].imag() != b.c[0].imag()) return a.c[0].imag() < b.c[0].imag();
        if (a.c[1].real() != b.c[1].real()) return a.c[1].real() < b.c[1].real();
        return a.c[1].imag() < b.c[1].imag();
    });
    for (const Point& z : found) push_point(m, s, z, 1, tol, n);
    s.count_lower_bound = true;
    if (s.total > s.expected)
        throw NumericalError("periodic_points: near-return count exceeds d_t^n");
    return s;
}

WeightedCloud periodic_measure(const MapSpec& m, const PeriodicPointSet& s,
                               bool repelling_only) {
    WeightedCloud c;
    c.k = m.k;
    c.provenance = Provenance::PeriodicPoints;
    double dn = static_cast<double>(degree_pow(m, s.period, 1LL << 62));
    for (const auto& p : s.points) {
        if (repelling_only && p.cls != PointClass::Repelling) continue;
        c.points.push_back(p.z);
        c.weights.push_back(static_cast<double>(p.multiplicity) / dn);
    }
    return c;
}

double discrepancy(const WeightedCloud& a, const WeightedCloud& b,
                   const std::vector<std::pair<std::string, Obs>>& fns) {
    double worst = 0.0;
    for (const auto& [name, f] : fns)
        worst = std::max(worst, std::abs(integrate(a, f) - integrate(b, f)));
    return worst;
}

}  // namespace dynlab
