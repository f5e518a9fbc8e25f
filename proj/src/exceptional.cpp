#include "dynlab/exceptional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynlab/parallel.hpp"
#include "dynlab/preimage.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

double AlgebraicSet::min_residual(const Point& w) const {
    const double scale = 1.0 + norm_of(w, k);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ln : lines) {
        if (ln.coord < 0 || ln.coord >= k) throw ConfigError("line coordinate out of range");
        best = std::min(best, std::abs(w.c[ln.coord] - ln.value) / scale);
    }
    for (const auto& p : points) best = std::min(best, dist(w, p, k) / scale);
    return best;
}

FiberCountSeries fiber_count_in_set(const MapSpec& m, const AlgebraicSet& X,
                                    const Point& probe, int n_max, double tol,
                                    long long cap) {
    if (X.empty()) throw ConfigError("empty algebraic set");
    if (X.k != m.k) throw ConfigError("algebraic set dimension mismatch");
    if (n_max < 0) throw ConfigError("n_max must be nonnegative");
    degree_pow(m, n_max, static_cast<double>(cap));  // enforce the count cap up front

    FiberCountSeries out;
    out.probe = probe;
    out.rows.resize(static_cast<size_t>(n_max) + 1);

    std::vector<std::pair<Point, long long>> frontier;
    {
        auto& r0 = out.rows[0];
        r0.n = 0;
        const double res = X.min_residual(probe);
        if (res <= tol) {
            frontier.emplace_back(probe, 1);
            r0.count = 1;
            r0.ratio = 1.0;
            r0.nearest_rejected = -1.0;
        } else {
            r0.count = 0;
            r0.ratio = 0.0;
            r0.nearest_rejected = res;
        }
    }

    double expected = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        expected *= static_cast<double>(m.dt);
        auto& row = out.rows[static_cast<size_t>(n)];
        row.n = n;
        double min_rej = std::numeric_limits<double>::infinity();
        std::vector<std::pair<Point, long long>> next;
        for (const auto& [w, mult] : frontier) {
            PreimageSet fs = fiber(m, w);
            for (const auto& pre : fs.points) {
                const double res = X.min_residual(pre.w);
                if (res <= tol)
                    next.emplace_back(pre.w, mult * static_cast<long long>(pre.multiplicity));
                else
                    min_rej = std::min(min_rej, res);
            }
        }
        frontier = std::move(next);
        long long total = 0;
        for (const auto& fp : frontier) total += fp.second;
        row.count = total;
        row.ratio = static_cast<double>(total) / expected;
        row.nearest_rejected = std::isfinite(min_rej) ? min_rej : -1.0;
        if (static_cast<double>(total) > expected + 0.5)
            throw NumericalError("fiber count exceeds degree law; set tolerance too loose");
    }

    out.tau = out.rows.back().ratio;
    out.member = true;
    out.drop_n = -1;
    expected = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (static_cast<double>(out.rows[static_cast<size_t>(n)].count) + 0.5 < expected) {
            out.member = false;
            out.drop_n = n;
            break;
        }
        expected *= static_cast<double>(m.dt);
    }
    return out;
}

std::vector<Point> probes_on_set(const AlgebraicSet& X, const Domain& V, int count,
                                 uint64_t seed) {
    if (X.empty()) throw ConfigError("empty algebraic set");
    if (count <= 0) throw ConfigError("probe count must be positive");
    if (X.k == 1 && !X.lines.empty()) throw ConfigError("lines need two dimensions");
    Rng rng = Rng::stream(seed, {0xe5e7u});
    const size_t comps = X.lines.size() + X.points.size();
    std::vector<Point> probes;
    probes.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const size_t c = static_cast<size_t>(i) % comps;
        if (c < X.lines.size()) {
            const auto& ln = X.lines[c];
            const int free_c = 1 - ln.coord;
            Point p(cplx(0.0), cplx(0.0));
            p.c[ln.coord] = ln.value;
            switch (V.shape) {
                case Shape::Polydisc:
                    p.c[free_c] = V.center[free_c] + V.radii[free_c] * rng.unit_disc();
                    break;
                case Shape::Annulus2D:
                    p.c[free_c] = V.center[free_c] +
                                  rng.annulus(V.radii[2 * free_c], V.radii[2 * free_c + 1]);
                    break;
                case Shape::Ball: {
                    const double off = std::abs(ln.value - V.center[ln.coord]);
                    const double r2 = V.radii[0] * V.radii[0] - off * off;
                    p.c[free_c] =
                        V.center[free_c] + std::sqrt(std::max(0.0, r2)) * rng.unit_disc();
                    break;
                }
            }
            probes.push_back(p);
        } else {
            probes.push_back(X.points[c - X.lines.size()]);
        }
    }
    return probes;
}

std::vector<FiberCountSeries> exceptional_verdicts(const MapSpec& m, const AlgebraicSet& X,
                                                   const std::vector<Point>& probes,
                                                   int n_max, double tol, long long cap,
                                                   int workers) {
    std::vector<FiberCountSeries> out(probes.size());
    parallel_for(probes.size(), workers, [&](size_t i) {
        out[i] = fiber_count_in_set(m, X, probes[i], n_max, tol, cap);
    });
    return out;
}

}  // namespace dynlab
