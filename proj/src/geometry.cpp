#include "dynlab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "dynlab/parallel.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr long long kBatch = 1 << 16;

struct Proposal {
    double volume = 0.0;
    std::function<Point(Rng&)> draw;
};

// Proposal covering f^-1(V) as tightly as the family allows; correctness only
// needs coverage, the indicator does the rest.
Proposal make_proposal(const MapSpec& m, const Domain& V) {
    Proposal pr;
    if (m.family == Family::ProductPower2D && !m.swapped &&
        (V.shape == Shape::Annulus2D || V.shape == Shape::Polydisc) &&
        V.center.c[0] == cplx(0.0) && V.center.c[1] == cplx(0.0)) {
        // exact per-coordinate preimage annuli/discs
        double in[2] = {0.0, 0.0}, out[2] = {0.0, 0.0};
        for (int c = 0; c < 2; ++c) {
            double lo = (V.shape == Shape::Annulus2D) ? V.radii[2 * c] : 0.0;
            double hi = (V.shape == Shape::Annulus2D) ? V.radii[2 * c + 1] : V.radii[c];
            in[c] = std::pow(lo, 1.0 / m.power);
            out[c] = std::pow(hi, 1.0 / m.power);
        }
        pr.volume = kPi * (out[0] * out[0] - in[0] * in[0]) * kPi *
                    (out[1] * out[1] - in[1] * in[1]);
        Point ctr = V.center;
        double i0 = in[0], o0 = out[0], i1 = in[1], o1 = out[1];
        pr.draw = [ctr, i0, o0, i1, o1](Rng& rng) {
            return Point(ctr.c[0] + rng.annulus(i0, o0), ctr.c[1] + rng.annulus(i1, o1));
        };
        return pr;
    }
    if (m.family == Family::ProductPower2D && m.swapped && V.shape == Shape::Polydisc &&
        V.center.c[0] == cplx(0.0) && V.center.c[1] == cplx(0.0)) {
        // f(z, w) = (w^d, 2z) lands in the polydisc iff |z| <= r2/2 and
        // |w| <= r1^(1/d)
        double rz = 0.5 * V.radii[1];
        double rw = std::pow(V.radii[0], 1.0 / m.power);
        pr.volume = kPi * rz * rz * kPi * rw * rw;
        pr.draw = [rz, rw](Rng& rng) {
            return Point(rz * rng.unit_disc(), rw * rng.unit_disc());
        };
        return pr;
    }
    if (m.family == Family::Skew2D && V.shape == Shape::Polydisc) {
        // z2 from V's base disc; z1 from the exact fiber disc of the first
        // coordinate constraint |lambda z1 + P(z2) - c1| <= r1
        double r1 = V.radii[0], r2 = V.radii[1];
        double rz1 = r1 / std::abs(m.lambda);
        pr.volume = (kPi * r2 * r2) * (kPi * rz1 * rz1);
        MapSpec mm = m;
        Point ctr = V.center;
        pr.draw = [mm, ctr, r2, rz1](Rng& rng) {
            cplx z2 = ctr.c[1] + r2 * rng.unit_disc();
            cplx mid = (ctr.c[0] - horner(mm.P, z2)) / mm.lambda;
            return Point(mid + rz1 * rng.unit_disc(), z2);
        };
        return pr;
    }
    // generic: bounding polydisc of V
    if (m.k == 1) {
        double R = V.outer_radius();
        pr.volume = kPi * R * R;
        Point ctr = V.center;
        pr.draw = [ctr, R](Rng& rng) { return Point(ctr.c[0] + R * rng.unit_disc()); };
        return pr;
    }
    double R0 = (V.shape == Shape::Polydisc) ? V.radii[0]
               : (V.shape == Shape::Annulus2D) ? V.radii[1]
                                               : V.radii[0];
    double R1 = (V.shape == Shape::Polydisc) ? V.radii[1]
               : (V.shape == Shape::Annulus2D) ? V.radii[3]
                                               : V.radii[0];
    pr.volume = kPi * R0 * R0 * kPi * R1 * R1;
    Point ctr = V.center;
    pr.draw = [ctr, R0, R1](Rng& rng) {
        return Point(ctr.c[0] + R0 * rng.unit_disc(), ctr.c[1] + R1 * rng.unit_disc());
    };
    return pr;
}

double form_integrand(const MapSpec& m, const Mat2& chain, int l) {
    if (m.k == 1) return (l == 0) ? 1.0 : frobenius2(chain);
    if (l == 0) return 2.0;
    if (l == 1) return frobenius2(chain);
    return 2.0 * abs2(det(chain));
}

struct LevelAcc {
    double sum = 0.0, sumsq = 0.0;
    long long survivors = 0;
};

}  // namespace

int algebraic_degree(const MapSpec& m) {
    switch (m.family) {
        case Family::Poly1D: return degree(m.p);
        case Family::Skew2D: return std::max({1, degree(m.P), degree(m.Q)});
        case Family::ProductPower2D: return m.power;
        case Family::Poly2DTriangularizable: return std::max(degree(m.S), degree(m.T));
    }
    return 0;
}

DegreeTable degree_table(const MapSpec& m, const Domain& V, int l, int n_max,
                         long long samples, uint64_t seed, int workers,
                         double min_acceptance) {
    if (l < 0 || l > m.k) throw ConfigError("degree_table: l must be in [0, k]");
    if (n_max < 0 || samples < 1) throw ConfigError("degree_table: bad n_max or samples");
    Proposal pr = make_proposal(m, V);

    long long nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<std::vector<LevelAcc>> parts(static_cast<size_t>(nbatch));

    parallel_for(static_cast<size_t>(nbatch), workers, [&](size_t b) {
        Rng rng = Rng::stream(seed, {0xd397, b});
        long long lo = static_cast<long long>(b) * kBatch;
        long long hi = std::min(samples, lo + kBatch);
        std::vector<LevelAcc> acc(static_cast<size_t>(n_max) + 1);
        for (long long i = lo; i < hi; ++i) {
            Point z = pr.draw(rng);
            if (!V.contains(z)) continue;
            Mat2 chain = Mat2::identity(m.k);
            Point y = z;
            for (int n = 0; n <= n_max; ++n) {
                // membership in f^-(n+1)(V): forward orbit stays in V
                Mat2 dfy = jacobian(m, y);
                y = eval(m, y);
                if (!V.contains(y)) break;
                double g = form_integrand(m, chain, l);
                acc[static_cast<size_t>(n)].sum += g;
                acc[static_cast<size_t>(n)].sumsq += g * g;
                acc[static_cast<size_t>(n)].survivors += 1;
                chain = dfy * chain;
            }
        }
        parts[b] = std::move(acc);
    });

    DegreeTable out;
    out.l = l;
    double ns = static_cast<double>(samples);
    for (int n = 0; n <= n_max; ++n) {
        LevelAcc t;
        for (const auto& p : parts) {
            t.sum += p[static_cast<size_t>(n)].sum;
            t.sumsq += p[static_cast<size_t>(n)].sumsq;
            t.survivors += p[static_cast<size_t>(n)].survivors;
        }
        double acc_rate = static_cast<double>(t.survivors) / ns;
        if (acc_rate < min_acceptance) {
            out.truncated = true;
            out.truncation_reason = "acceptance rate " + fmt_g17(acc_rate) + " at n=" +
                                    fmt_int(n) + " below " + fmt_g17(min_acceptance);
            break;
        }
        double mean = t.sum / ns;
        double var = std::max(0.0, t.sumsq / ns - mean * mean);
        DegreeRow row;
        row.n = n;
        row.estimate = pr.volume * mean;
        row.se = pr.volume * std::sqrt(var / ns);
        row.samples = samples;
        row.survivors = t.survivors;
        out.rows.push_back(row);
    }
    if (out.rows.empty())
        throw NumericalError("degree_table: no level met the acceptance floor");

    // growth fit over the last half of the requested range
    size_t want = static_cast<size_t>((n_max + 1) / 2);
    if (want < 2) want = 2;
    std::vector<double> xs, ys;
    size_t start = out.rows.size() > want ? out.rows.size() - want : 0;
    for (size_t i = start; i < out.rows.size(); ++i) {
        if (out.rows[i].estimate > 0.0) {
            xs.push_back(static_cast<double>(out.rows[i].n));
            ys.push_back(std::log(out.rows[i].estimate));
        }
    }
    out.fit_rows = xs.size();
    if (xs.size() >= 2) {
        out.growth_rate = linear_fit(xs, ys).slope;
    } else {
        out.growth_rate = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

std::pair<double, double> degree_estimate(const MapSpec& m, const Domain& V, int l, int n,
                                          long long samples, uint64_t seed, int workers,
                                          double min_acceptance) {
    DegreeTable t = degree_table(m, V, l, n, samples, seed, workers, min_acceptance);
    for (const auto& r : t.rows)
        if (r.n == n) return {r.estimate, r.se};
    throw NumericalError("degree_estimate: level " + fmt_int(n) + " starved: " +
                         t.truncation_reason);
}

CriticalMassSeries critical_volume(const MapSpec& m, const Domain& V, int n_max,
                                   long long samples, uint64_t seed, int workers) {
    if (m.k != 2) throw ConfigError("critical_volume: 2D maps only");
    if (n_max < 0 || samples < 1) throw ConfigError("critical_volume: bad n_max or samples");
    CriticalSet cs = critical_set(m);

    // per line and level: mean and variance of the pulled-back area density
    std::vector<std::vector<LevelAcc>> line_acc;
    std::vector<double> line_area;

    for (const auto& line : cs.lines) {
        int i0 = line.fixed_coord, i1 = 1 - i0;
        // slice region of V in the free coordinate; empty when the fixed
        // value violates V's constraint on its own coordinate
        double area = 0.0;
        double lo = 0.0, hi = 0.0;
        bool ring = false;
        bool empty = false;
        double off = std::abs(line.value - V.center.c[i0]);
        switch (V.shape) {
            case Shape::Ball: {
                if (off >= V.radii[0]) { empty = true; break; }
                hi = std::sqrt(V.radii[0] * V.radii[0] - off * off);
                area = kPi * hi * hi;
                break;
            }
            case Shape::Polydisc: {
                if (off >= V.radii[i0]) { empty = true; break; }
                hi = V.radii[i1];
                area = kPi * hi * hi;
                break;
            }
            case Shape::Annulus2D: {
                if (off <= V.radii[2 * i0] || off >= V.radii[2 * i0 + 1]) { empty = true; break; }
                ring = true;
                lo = V.radii[2 * i1];
                hi = V.radii[2 * i1 + 1];
                area = kPi * (hi * hi - lo * lo);
                break;
            }
        }
        std::vector<LevelAcc> acc(static_cast<size_t>(n_max) + 1);
        if (!empty) {
            long long nbatch = (samples + kBatch - 1) / kBatch;
            std::vector<std::vector<LevelAcc>> parts(static_cast<size_t>(nbatch));
            parallel_for(static_cast<size_t>(nbatch), workers, [&](size_t b) {
                Rng rng = Rng::stream(seed, {0xcc11, static_cast<uint64_t>(i0), b,
                                             std::bit_cast<uint64_t>(line.value.real())});
                long long blo = static_cast<long long>(b) * kBatch;
                long long bhi = std::min(samples, blo + kBatch);
                std::vector<LevelAcc> a(static_cast<size_t>(n_max) + 1);
                for (long long i = blo; i < bhi; ++i) {
                    Point z;
                    z.c[i0] = line.value;
                    z.c[i1] = V.center.c[i1] +
                              (ring ? rng.annulus(lo, hi) : hi * rng.unit_disc());
                    if (!V.contains(z)) continue;
                    // tangent of the line under the orbit chain
                    cplx u[2] = {0.0, 0.0};
                    u[i1] = 1.0;
                    Point y = z;
                    for (int n = 0; n <= n_max; ++n) {
                        Mat2 dfy = jacobian(m, y);
                        y = eval(m, y);
                        if (!V.contains(y)) break;
                        double g = abs2(u[0]) + abs2(u[1]);
                        a[static_cast<size_t>(n)].sum += g;
                        a[static_cast<size_t>(n)].sumsq += g * g;
                        a[static_cast<size_t>(n)].survivors += 1;
                        cplx v0 = dfy.a[0][0] * u[0] + dfy.a[0][1] * u[1];
                        cplx v1 = dfy.a[1][0] * u[0] + dfy.a[1][1] * u[1];
                        u[0] = v0;
                        u[1] = v1;
                    }
                }
                parts[b] = std::move(a);
            });
            for (const auto& p : parts)
                for (size_t n = 0; n < acc.size(); ++n) {
                    acc[n].sum += p[n].sum;
                    acc[n].sumsq += p[n].sumsq;
                    acc[n].survivors += p[n].survivors;
                }
        }
        line_acc.push_back(std::move(acc));
        line_area.push_back(area);
    }

    CriticalMassSeries out;
    double ns = static_cast<double>(samples);
    for (int n = 0; n <= n_max; ++n) {
        double dtn = std::pow(static_cast<double>(m.dt), n);
        double v = 0.0, var = 0.0;
        for (size_t li = 0; li < line_acc.size(); ++li) {
            const LevelAcc& a = line_acc[li][static_cast<size_t>(n)];
            double mean = a.sum / ns;
            double vr = std::max(0.0, a.sumsq / ns - mean * mean);
            v += line_area[li] * mean / dtn;
            double se_li = line_area[li] * std::sqrt(vr / ns) / dtn;
            var += se_li * se_li;
        }
        out.rows.push_back({n, v, std::sqrt(var)});
        out.total += v;
    }

    DecaySeries ds;
    for (const auto& r : out.rows) ds.rows.push_back({r.n, r.value, r.se});
    fit_decay(ds);
    out.fitted_ratio = ds.fitted_rate;
    out.fit_points = ds.fit_points;
    out.series_divergent = std::isfinite(ds.fitted_rate) && ds.fitted_rate >= 1.0;
    return out;
}

PlbReport plb_decay(const MapSpec& m, const Domain& V, int n_max, long long samples,
                    uint64_t seed, int workers) {
    DegreeTable t = degree_table(m, V, 1, n_max, samples, seed, workers);
    PlbReport rep;
    for (const auto& r : t.rows) {
        double dtn = std::pow(static_cast<double>(m.dt), r.n);
        rep.series.rows.push_back({r.n, r.estimate / dtn, r.se / dtn});
    }
    fit_decay(rep.series);
    rep.algebraic_degree = algebraic_degree(m);
    double dk1 = (m.k == 2) ? static_cast<double>(rep.algebraic_degree) : 1.0;
    rep.alpha = dk1 / static_cast<double>(m.dt);
    rep.alpha_applicable = static_cast<double>(m.dt) > dk1;
    return rep;
}

}  // namespace dynlab
