#include "dynlab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "dynlab/parallel.hpp"

namespace dynlab {

namespace {

// complex sample mean + scalar se = sqrt(se_re^2 + se_im^2)
struct CplxStat {
    cplx mean{};
    double se = 0.0;
};

CplxStat cplx_mean_se(const std::vector<cplx>& xs) {
    CplxStat r;
    if (xs.empty()) return r;
    for (cplx x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double v = 0.0;
    for (cplx x : xs) v += abs2(x - r.mean);
    v /= static_cast<double>(xs.size() - 1);
    r.se = std::sqrt(v / static_cast<double>(xs.size()));
    return r;
}

// weighted residual |sum w (a_i - b_i)| with block-means se
void residual_with_se(const std::vector<cplx>& diffs, const std::vector<double>& ws,
                      size_t block, double& resid, double& se) {
    cplx s = 0.0;
    for (size_t i = 0; i < diffs.size(); ++i) s += ws[i] * diffs[i];
    resid = std::abs(s);
    std::vector<double> re(diffs.size()), im(diffs.size());
    for (size_t i = 0; i < diffs.size(); ++i) {
        re[i] = diffs[i].real();
        im[i] = diffs[i].imag();
    }
    MeanSe mre = batch_mean_se(re, block);
    MeanSe mim = batch_mean_se(im, block);
    se = std::sqrt(mre.se * mre.se + mim.se * mim.se);
}

}  // namespace

int default_burn_in(const MapSpec& m, const Domain& V) {
    double diam = std::max(V.diameter(), 1e-6);
    double steps = std::log(diam / 1e-9) / std::log(static_cast<double>(m.dt));
    return 20 + static_cast<int>(std::ceil(std::max(0.0, steps)));
}

std::vector<Point> backward_walk(const MapSpec& m, const Point& start, int steps,
                                 Rng& rng, double tol) {
    std::vector<Point> w;
    w.reserve(steps + 1);
    w.push_back(start);
    for (int t = 0; t < steps; ++t) w.push_back(random_preimage(m, w.back(), rng, tol));
    return w;
}

WeightedCloud sample_equilibrium(const MapSpec& m, const Domain& V,
                                 const SampleOptions& opts, uint64_t seed) {
    if (opts.walkers < 1 || opts.per_walker < 1)
        throw ConfigError("sample_equilibrium: walkers and per_walker must be >= 1");
    long long burn = opts.burn_in >= 0 ? opts.burn_in : default_burn_in(m, V);
    long long W = opts.walkers, L = opts.per_walker;

    std::vector<std::vector<Point>> slots(W);
    std::vector<char> failed(W, 0);

    parallel_for(static_cast<size_t>(W), opts.workers, [&](size_t wi) {
        Rng rng = Rng::stream(seed, {0x5a17, wi});
        Point start;
        if (opts.start_law == "uniform") {
            start = V.sample_uniform(rng);
        } else if (opts.start_law == "center") {
            start = V.center;
        } else if (opts.start_law == "point") {
            start = opts.start_point;
        } else {
            throw ConfigError("sample_equilibrium: unknown start_law \"" + opts.start_law +
                              "\"");
        }
        try {
            std::vector<Point> walk = backward_walk(m, start, static_cast<int>(burn + L), rng);
            std::vector<Point> kept(walk.begin() + burn + 1, walk.end());
            for (const Point& p : kept)
                if (!V.contains(p)) throw NumericalError("walker left the domain");
            slots[wi] = std::move(kept);
        } catch (const NumericalError&) {
            failed[wi] = 1;
        }
    });

    long long nfail = std::count(failed.begin(), failed.end(), 1);
    if (static_cast<double>(nfail) > opts.max_failed_fraction * static_cast<double>(W))
        throw NumericalError("sample_equilibrium: " + fmt_int(nfail) + " of " + fmt_int(W) +
                             " walkers failed");

    WeightedCloud c;
    c.k = m.k;
    c.provenance = Provenance::BackwardWalk;
    c.seed = seed;
    c.walkers = W;
    c.per_walker = L;
    c.burn_in = burn;
    c.kept_walkers = W - nfail;
    c.start_law = opts.start_law;
    c.points.reserve(static_cast<size_t>(c.kept_walkers * L));
    for (long long wi = 0; wi < W; ++wi)
        if (!failed[wi])
            c.points.insert(c.points.end(), slots[wi].begin(), slots[wi].end());
    double w = 1.0 / static_cast<double>(c.points.size());
    c.weights.assign(c.points.size(), w);
    return c;
}

cplx transfer_apply(const MapSpec& m, const Obs& phi, const Point& z) {
    PreimageSet f = fiber(m, z);
    cplx s = 0.0;
    for (const auto& q : f.points) s += static_cast<double>(q.multiplicity) * phi(q.w);
    return s / static_cast<double>(m.dt);
}

TransferValue transfer_iterate(const MapSpec& m, const Obs& phi, int n, const Point& z,
                               long long budget, uint64_t seed) {
    TransferValue out;
    bool fits = true;
    long long cnt = 1;
    for (int i = 0; i < n && fits; ++i) {
        if (cnt > budget / m.dt) fits = false;
        cnt *= m.dt;
    }
    if (fits) {
        PreimageSet f = iterated_fiber(m, z, n, budget);
        cplx s = 0.0;
        for (const auto& q : f.points) s += static_cast<double>(q.multiplicity) * phi(q.w);
        out.value = s / static_cast<double>(f.total);
        out.exact = true;
        return out;
    }
    std::vector<cplx> vals(static_cast<size_t>(budget));
    for (long long c = 0; c < budget; ++c) {
        Rng rng = Rng::stream(seed, {0x7c41, static_cast<uint64_t>(c)});
        Point w = z;
        for (int t = 0; t < n; ++t) w = random_preimage(m, w, rng);
        vals[static_cast<size_t>(c)] = phi(w);
    }
    CplxStat st = cplx_mean_se(vals);
    out.value = st.mean;
    out.se = st.se;
    return out;
}

std::vector<InvarianceRow> invariance_report(
    const MapSpec& m, const WeightedCloud& c,
    const std::vector<std::pair<std::string, Obs>>& fns) {
    c.require_probability();
    size_t N = c.size();
    size_t block = (c.per_walker > 1 && N % static_cast<size_t>(c.per_walker) == 0)
                       ? static_cast<size_t>(c.per_walker)
                       : 1;

    // one fiber solve per point, shared across observables
    std::vector<std::vector<cplx>> push_diff(fns.size(), std::vector<cplx>(N));
    std::vector<std::vector<cplx>> pull_diff(fns.size(), std::vector<cplx>(N));
    for (size_t i = 0; i < N; ++i) {
        const Point& x = c.points[i];
        Point fx = eval(m, x);
        PreimageSet fib = fiber(m, x);
        for (size_t j = 0; j < fns.size(); ++j) {
            const Obs& phi = fns[j].second;
            cplx base = phi(x);
            cplx lphi = 0.0;
            for (const auto& q : fib.points)
                lphi += static_cast<double>(q.multiplicity) * phi(q.w);
            lphi /= static_cast<double>(m.dt);
            push_diff[j][i] = phi(fx) - base;
            pull_diff[j][i] = lphi - base;
        }
    }

    std::vector<InvarianceRow> rows;
    for (size_t j = 0; j < fns.size(); ++j) {
        InvarianceRow r;
        r.name = fns[j].first;
        residual_with_se(push_diff[j], c.weights, block, r.push_residual, r.push_se);
        residual_with_se(pull_diff[j], c.weights, block, r.pull_residual, r.pull_se);
        rows.push_back(r);
    }
    return rows;
}

DecaySeries l2_convergence(const MapSpec& m, const WeightedCloud& c, const Obs& phi,
                           int n_max, long long budget, int subsample, uint64_t seed) {
    c.require_probability();
    size_t N = c.size();
    if (N == 0) throw ConfigError("l2_convergence: empty cloud");
    size_t sub = std::min<size_t>(static_cast<size_t>(std::max(1, subsample)), N);
    cplx target = integrate(c, phi);

    bool fits = true;
    long long cnt = 1;
    for (int i = 0; i < n_max && fits; ++i) {
        if (cnt > budget / m.dt) fits = false;
        cnt *= m.dt;
    }

    // per subsample point and per n, the value (L^n phi)(x)
    std::vector<std::vector<cplx>> lv(sub, std::vector<cplx>(n_max + 1));
    parallel_for(sub, 1, [&](size_t si) {
        const Point& x = c.points[si * N / sub];
        lv[si][0] = phi(x);
        if (fits) {
            std::vector<PreimagePoint> frontier = {{x, 1}};
            for (int n = 1; n <= n_max; ++n) {
                std::vector<PreimagePoint> next;
                next.reserve(frontier.size() * m.dt);
                for (const auto& q : frontier) {
                    PreimageSet f = fiber(m, q.w);
                    for (const auto& r : f.points)
                        next.push_back({r.w, r.multiplicity * q.multiplicity});
                }
                frontier = std::move(next);
                cplx s = 0.0;
                long long tot = 0;
                for (const auto& q : frontier) {
                    s += static_cast<double>(q.multiplicity) * phi(q.w);
                    tot += q.multiplicity;
                }
                lv[si][n] = s / static_cast<double>(tot);
            }
        } else {
            long long chains = budget;
            std::vector<cplx> acc(n_max + 1, 0.0);
            for (long long ch = 0; ch < chains; ++ch) {
                Rng rng = Rng::stream(seed, {0x12f, si, static_cast<uint64_t>(ch)});
                Point w = x;
                for (int n = 1; n <= n_max; ++n) {
                    w = random_preimage(m, w, rng);
                    acc[n] += phi(w);
                }
            }
            for (int n = 1; n <= n_max; ++n) lv[si][n] = acc[n] / static_cast<double>(chains);
        }
    });

    DecaySeries out;
    for (int n = 0; n <= n_max; ++n) {
        std::vector<double> y(sub);
        for (size_t si = 0; si < sub; ++si) y[si] = abs2(lv[si][n] - target);
        MeanSe ms = mean_se(y);
        double v = std::sqrt(std::max(0.0, ms.mean));
        double se = (v > 1e-12) ? ms.se / (2.0 * v) : std::sqrt(ms.se);
        out.rows.push_back({n, v, se});
    }
    fit_decay(out);
    return out;
}

std::vector<std::pair<std::string, Obs>> default_observables(int k, const Domain& V,
                                                             uint64_t seed, int count) {
    std::vector<std::pair<std::string, Obs>> fns;
    double o = V.outer_radius();
    Point ctr = V.center;
    if (k == 1) {
        for (int a = 1; a <= 4 && static_cast<int>(fns.size()) < count; ++a) {
            fns.emplace_back("moment_" + std::to_string(a), [a, o, ctr](const Point& z) {
                return ipow((z.c[0] - ctr.c[0]) / o, a);
            });
        }
        // squared-modulus moments: not harmonic, so they separate measures
        // that agree on every holomorphic moment (point mass vs circle)
        for (int a = 1; a <= 2 && static_cast<int>(fns.size()) < count; ++a) {
            fns.emplace_back("absmoment_" + std::to_string(a), [a, o, ctr](const Point& z) {
                return cplx(std::pow(abs2((z.c[0] - ctr.c[0]) / o), a), 0.0);
            });
        }
    } else {
        const int ab[6][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 2}};
        for (const auto& e : ab) {
            if (static_cast<int>(fns.size()) >= count) break;
            int a = e[0], b = e[1];
            fns.emplace_back("moment_" + std::to_string(a) + "_" + std::to_string(b),
                             [a, b, o, ctr](const Point& z) {
                                 return ipow((z.c[0] - ctr.c[0]) / o, a) *
                                        ipow((z.c[1] - ctr.c[1]) / o, b);
                             });
        }
        for (int c = 0; c < 2 && static_cast<int>(fns.size()) < count; ++c) {
            fns.emplace_back("absmoment_" + std::to_string(c + 1), [c, o, ctr](const Point& z) {
                return cplx(abs2((z.c[c] - ctr.c[c]) / o), 0.0);
            });
        }
    }
    Rng rng = Rng::stream(seed, {0x0b5});
    int bump_id = 0;
    while (static_cast<int>(fns.size()) < count) {
        Point ctr2 = V.sample_uniform(rng);
        double s = (0.2 + 0.3 * rng.u01()) * o;
        int kk = k;
        fns.emplace_back("bump_" + std::to_string(bump_id++), [ctr2, s, kk](const Point& z) {
            double d2 = abs2(z.c[0] - ctr2.c[0]);
            if (kk == 2) d2 += abs2(z.c[1] - ctr2.c[1]);
            return cplx(std::exp(-d2 / (2.0 * s * s)), 0.0);
        });
    }
    return fns;
}

}  // namespace dynlab
