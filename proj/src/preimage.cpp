#include "dynlab/preimage.hpp"

#include <cmath>

#include "dynlab/roots.hpp"
#include "dynlab/stats.hpp"

namespace dynlab {

namespace {

// flat list of exactly d_t preimages, repeated roots listed repeatedly
std::vector<Point> raw_fiber_points(const MapSpec& m, const Point& z) {
    std::vector<Point> out;
    switch (m.family) {
        case Family::Poly1D: {
            Poly q = m.p;
            q[0] -= z.c[0];
            for (cplx r : poly_roots(q)) out.emplace_back(r);
            break;
        }
        case Family::Skew2D: {
            Poly q = m.Q;
            q[0] -= z.c[1];
            for (cplx w2 : poly_roots(q))
                out.emplace_back((z.c[0] - horner(m.P, w2)) / m.lambda, w2);
            break;
        }
        case Family::ProductPower2D: {
            if (m.swapped) {
                // f(z, w) = (w^d, 2z): w^d = target_1, z = target_2 / 2
                cplx w1 = 0.5 * z.c[1];
                if (z.c[0] == cplx(0.0)) {
                    for (int i = 0; i < m.power; ++i) out.emplace_back(w1, cplx(0.0));
                } else {
                    for (cplx w : nth_roots(z.c[0], m.power)) out.emplace_back(w1, w);
                }
            } else {
                auto coord_roots = [&](cplx a) {
                    if (a == cplx(0.0)) return std::vector<cplx>(m.power, cplx(0.0));
                    return nth_roots(a, m.power);
                };
                std::vector<cplx> rz = coord_roots(z.c[0]), rw = coord_roots(z.c[1]);
                for (cplx a : rz)
                    for (cplx b : rw) out.emplace_back(a, b);
            }
            break;
        }
        case Family::Poly2DTriangularizable: {
            // f(z1, z2) = (S(z2), T(z1)): S(w2) = target_1, T(w1) = target_2
            Poly qs = m.S, qt = m.T;
            qs[0] -= z.c[0];
            qt[0] -= z.c[1];
            std::vector<cplx> r2 = poly_roots(qs), r1 = poly_roots(qt);
            for (cplx a : r1)
                for (cplx b : r2) out.emplace_back(a, b);
            break;
        }
    }
    return out;
}

void check_residual(const MapSpec& m, const Point& z, const Point& w, double tol) {
    double r = dist(eval(m, w), z, m.k);
    if (!(r <= tol * (1.0 + norm_of(z, m.k))))
        throw NumericalError("fiber: preimage residual " + fmt_g17(r) +
                             " exceeds tolerance at order-1 solve");
}

}  // namespace

PreimageSet fiber(const MapSpec& m, const Point& z, double tol) {
    std::vector<Point> raw = raw_fiber_points(m, z);
    if (static_cast<int>(raw.size()) != m.dt)
        throw NumericalError("fiber: solver returned " + fmt_int((long long)raw.size()) +
                             " points, expected " + fmt_int(m.dt));

    // merge numerically coincident roots into multiplicity
    double ctol = 1e-7;
    PreimageSet ps;
    ps.base = z;
    ps.order = 1;
    for (const Point& w : raw) {
        bool merged = false;
        for (auto& q : ps.points) {
            if (dist(q.w, w, m.k) <= ctol * (1.0 + norm_of(w, m.k))) {
                // running mean keeps the representative centered
                double t = 1.0 / static_cast<double>(q.multiplicity + 1);
                for (int i = 0; i < m.k; ++i)
                    q.w.c[i] += (w.c[i] - q.w.c[i]) * t;
                q.multiplicity += 1;
                merged = true;
                break;
            }
        }
        if (!merged) ps.points.push_back({w, 1});
    }
    ps.total = 0;
    for (const auto& q : ps.points) {
        check_residual(m, z, q.w, tol);
        ps.total += q.multiplicity;
    }
    if (ps.total != m.dt)
        throw NumericalError("fiber: multiplicity total mismatch");
    return ps;
}

PreimageSet iterated_fiber(const MapSpec& m, const Point& z, int n, long long cap,
                           double tol) {
    if (n < 0) throw ConfigError("iterated_fiber: order must be >= 0");
    long long expect = degree_pow(m, n, cap);

    PreimageSet ps;
    ps.base = z;
    ps.order = n;
    ps.points = {{z, 1}};
    for (int level = 0; level < n; ++level) {
        std::vector<PreimagePoint> next;
        next.reserve(ps.points.size() * m.dt);
        for (const auto& q : ps.points) {
            PreimageSet f = fiber(m, q.w, tol);
            for (const auto& r : f.points)
                next.push_back({r.w, r.multiplicity * q.multiplicity});
        }
        ps.points = std::move(next);
    }
    ps.total = 0;
    for (const auto& q : ps.points) ps.total += q.multiplicity;
    if (ps.total != expect)
        throw NumericalError("iterated_fiber: count " + fmt_int(ps.total) +
                             " != " + fmt_int(expect));
    return ps;
}

Point random_preimage(const MapSpec& m, const Point& z, Rng& rng, double tol) {
    std::vector<Point> raw = raw_fiber_points(m, z);
    if (static_cast<int>(raw.size()) != m.dt)
        throw NumericalError("random_preimage: solver returned wrong count");
    const Point& w = raw[rng.bounded(raw.size())];
    check_residual(m, z, w, tol);
    return w;
}

}  // namespace dynlab
