#include "dynlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "dynlab/parallel.hpp"
#include "dynlab/rng.hpp"

namespace dynlab {

namespace {

// one QR step of the derivative cocycle: B = Df * Q_prev, factor B = QR,
// return diag growth (r11, r22) and the new orthonormal frame
void qr_step(const Mat2& df, cplx q[2][2], double& r11, double& r22) {
    cplx b[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            b[i][j] = df.a[i][0] * q[0][j] + df.a[i][1] * q[1][j];
    r11 = std::sqrt(abs2(b[0][0]) + abs2(b[1][0]));
    if (r11 == 0.0) return;  // caller discards on zero growth
    q[0][0] = b[0][0] / r11;
    q[1][0] = b[1][0] / r11;
    cplx proj = std::conj(q[0][0]) * b[0][1] + std::conj(q[1][0]) * b[1][1];
    cplx v0 = b[0][1] - proj * q[0][0];
    cplx v1 = b[1][1] - proj * q[1][0];
    r22 = std::sqrt(abs2(v0) + abs2(v1));
    if (r22 == 0.0) return;
    q[0][1] = v0 / r22;
    q[1][1] = v1 / r22;
}

}  // namespace

LyapSpectrum lyapunov(const MapSpec& m, const WeightedCloud& cloud,
                      const LyapOptions& opts, uint64_t seed) {
    cloud.require_probability();
    if (cloud.k != m.k) throw ConfigError("lyapunov: cloud dimension mismatch");
    size_t N = cloud.size();
    int S = opts.samples;
    int L = opts.orbit_length;
    if (N == 0 || S < 2 || L < 1) throw ConfigError("lyapunov: bad sample parameters");

    struct OrbitAcc {
        double e[2] = {0.0, 0.0};
        bool ok = false;
    };
    std::vector<OrbitAcc> acc(S);

    parallel_for(static_cast<size_t>(S), opts.workers, [&](size_t si) {
        Rng rng = Rng::stream(seed, {0x17ab, si});
        const Point& start = cloud.points[si * N / S];
        std::vector<Point> walk;
        try {
            walk = backward_walk(m, start, L, rng);
        } catch (const NumericalError&) {
            return;  // discarded
        }
        // reversed walk = forward orbit of length L+1
        double a1 = 0.0, a2 = 0.0;
        cplx q[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
        for (int t = 0; t < L; ++t) {
            const Point& x = walk[static_cast<size_t>(L - t)];
            Mat2 df = jacobian(m, x);
            if (m.k == 1) {
                double g = std::abs(df.a[0][0]);
                if (g == 0.0) return;
                a1 += std::log(g);
            } else {
                double r11 = 0.0, r22 = 0.0;
                qr_step(df, q, r11, r22);
                if (r11 == 0.0 || r22 == 0.0) return;
                a1 += std::log(r11);
                a2 += std::log(r22);
            }
        }
        acc[si].e[0] = a1 / L;
        acc[si].e[1] = a2 / L;
        acc[si].ok = true;
    });

    std::vector<double> e1, e2, esum;
    for (const auto& a : acc) {
        if (!a.ok) continue;
        double hi = a.e[0], lo = a.e[1];
        if (m.k == 2 && hi < lo) std::swap(hi, lo);
        e1.push_back(hi);
        e2.push_back(lo);
        esum.push_back(m.k == 2 ? a.e[0] + a.e[1] : a.e[0]);
    }
    int discarded = S - static_cast<int>(e1.size());
    if (static_cast<double>(discarded) > opts.max_discard_fraction * S)
        throw NumericalError("lyapunov: " + fmt_int(discarded) + " of " + fmt_int(S) +
                             " orbits discarded");

    LyapSpectrum out;
    out.orbit_length = L;
    out.samples_used = static_cast<int>(e1.size());
    out.discarded = discarded;
    MeanSe m1 = mean_se(e1);
    out.exponents.push_back(m1.mean);
    out.se.push_back(m1.se);
    if (m.k == 2) {
        MeanSe m2 = mean_se(e2);
        out.exponents.push_back(m2.mean);
        out.se.push_back(m2.se);
    }
    MeanSe ms = mean_se(esum);
    out.sum = ms.mean;
    out.sum_se = ms.se;

    // direct integral of log |det Df| over the full cloud
    std::vector<double> ld(N);
    for (size_t i = 0; i < N; ++i) ld[i] = std::log(std::abs(det(jacobian(m, cloud.points[i]))));
    size_t block = (cloud.per_walker > 1 && N % static_cast<size_t>(cloud.per_walker) == 0)
                       ? static_cast<size_t>(cloud.per_walker)
                       : 1;
    MeanSe mj = batch_mean_se(ld, block);
    out.jacobian_integral = mj.mean;
    out.jacobian_integral_se = mj.se;
    return out;
}

DecaySeries mixing_decay(const MapSpec& m, const Domain& V, const WeightedCloud& cloud,
                         const Obs& phi, const Obs& psi, int n_max) {
    cloud.require_probability();
    size_t N = cloud.size();
    size_t block = (cloud.per_walker > 1 && N % static_cast<size_t>(cloud.per_walker) == 0)
                       ? static_cast<size_t>(cloud.per_walker)
                       : 1;

    std::vector<Point> pos = cloud.points;
    std::vector<char> alive(N, 1);
    std::vector<cplx> psi0(N);
    for (size_t i = 0; i < N; ++i) psi0[i] = psi(cloud.points[i]);

    DecaySeries out;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) {
            size_t dead = 0;
            for (size_t i = 0; i < N; ++i) {
                if (!alive[i]) { ++dead; continue; }
                pos[i] = eval(m, pos[i]);
                if (!V.contains(pos[i])) {
                    alive[i] = 0;
                    ++dead;
                }
            }
            if (static_cast<double>(dead) > 0.10 * static_cast<double>(N))
                throw NumericalError("mixing_decay: over 10% of orbits left the domain by n=" +
                                     fmt_int(n));
        }
        double wsum = 0.0;
        for (size_t i = 0; i < N; ++i)
            if (alive[i]) wsum += cloud.weights[i];
        cplx mphi = 0.0, mpsi = 0.0;
        for (size_t i = 0; i < N; ++i) {
            if (!alive[i]) continue;
            mphi += cloud.weights[i] * phi(pos[i]);
            mpsi += cloud.weights[i] * psi0[i];
        }
        mphi /= wsum;
        mpsi /= wsum;
        cplx cov = 0.0;
        std::vector<double> term_re, term_im;
        term_re.reserve(N);
        term_im.reserve(N);
        for (size_t i = 0; i < N; ++i) {
            if (!alive[i]) continue;
            cplx t = (phi(pos[i]) - mphi) * (psi0[i] - mpsi);
            cov += cloud.weights[i] * t / wsum;
            term_re.push_back(t.real());
            term_im.push_back(t.imag());
        }
        MeanSe sre = batch_mean_se(term_re, block);
        MeanSe sim = batch_mean_se(term_im, block);
        out.rows.push_back({n, std::abs(cov),
                            std::sqrt(sre.se * sre.se + sim.se * sim.se)});
    }
    fit_decay(out);
    return out;
}

double entropy_estimate(const MapSpec& m, const Domain& V, const WeightedCloud& cloud,
                        const std::vector<double>& eps, int n_max, EntropyDetail* detail) {
    cloud.require_probability();
    if (eps.empty() || n_max < 3) throw ConfigError("entropy_estimate: need eps and n_max >= 3");
    size_t N = cloud.size();

    // forward orbits of length n_max (positions 0..n_max), keeping only those
    // that stay in V; stored flat, stride n_max+1
    const size_t stride = static_cast<size_t>(n_max) + 1;
    std::vector<Point> orb;
    orb.reserve(N * stride);
    std::vector<Point> o(stride);
    for (size_t i = 0; i < N; ++i) {
        o[0] = cloud.points[i];
        bool ok = true;
        for (int t = 1; t <= n_max; ++t) {
            o[static_cast<size_t>(t)] = eval(m, o[static_cast<size_t>(t - 1)]);
            if (!V.contains(o[static_cast<size_t>(t)])) { ok = false; break; }
        }
        if (ok) orb.insert(orb.end(), o.begin(), o.end());
    }
    size_t M = orb.size() / stride;
    if (M < N / 2)
        throw NumericalError("entropy_estimate: over half the orbits left the domain");

    EntropyDetail local;
    EntropyDetail& det = detail ? *detail : local;
    det.eps = eps;
    det.counts.assign(eps.size(), {});
    det.slopes.assign(eps.size(), 0.0);
    det.fit_lo.assign(eps.size(), 0);
    det.fit_hi.assign(eps.size(), 0);

    int k = m.k;
    auto separated = [&](size_t i, size_t j, int n, double e) {
        const Point* a = orb.data() + i * stride;
        const Point* b = orb.data() + j * stride;
        for (int t = 0; t < n; ++t)
            if (dist(a[t], b[t], k) >= e) return true;
        return false;
    };

    // Two points can only fail to be separated when their starting positions
    // are within eps, so the greedy pass needs to test a candidate only
    // against kept points in the 3^(2k) cell neighborhood of its start. The
    // kept set is identical to the plain quadratic scan.
    auto cell_key = [&](const Point& z, double e) {
        uint64_t h = 0x9e3779b97f4a7c15ull;
        for (int c = 0; c < k; ++c) {
            h = mix64(h ^ static_cast<uint64_t>(
                              static_cast<int64_t>(std::floor(z.c[c].real() / e))));
            h = mix64(h ^ static_cast<uint64_t>(
                              static_cast<int64_t>(std::floor(z.c[c].imag() / e))));
        }
        return h;
    };
    auto neighbor_keys = [&](const Point& z, double e, std::vector<uint64_t>& keys) {
        keys.clear();
        const int dims = 2 * k;
        int off[4] = {0, 0, 0, 0};
        double x[4];
        for (int c = 0; c < k; ++c) {
            x[2 * c] = z.c[c].real();
            x[2 * c + 1] = z.c[c].imag();
        }
        for (;;) {
            uint64_t h = 0x9e3779b97f4a7c15ull;
            for (int d = 0; d < dims; ++d) {
                int64_t q = static_cast<int64_t>(std::floor(x[d] / e)) + off[d];
                h = mix64(h ^ static_cast<uint64_t>(q));
            }
            keys.push_back(h);
            int d = 0;
            while (d < dims && off[d] == 1) off[d++] = -1;
            if (d == dims) break;
            ++off[d];
        }
    };

    // Greedy packing from a finite sample undercounts the true maximal
    // packing with a deficit growing like sqrt(count/M), which bends the
    // log-count slope downward; counts are only trusted well below M.
    const long long cap =
        std::max<long long>(3, static_cast<long long>(0.02 * static_cast<double>(M)));
    std::vector<double> slopes;
    for (size_t ei = 0; ei < eps.size(); ++ei) {
        double e = eps[ei];
        std::vector<long long>& cnts = det.counts[ei];
        for (int n = 1; n <= n_max; ++n) {
            std::unordered_map<uint64_t, std::vector<size_t>> grid;
            std::vector<uint64_t> keys;
            long long kept = 0;
            for (size_t i = 0; i < M; ++i) {
                const Point& z0 = orb[i * stride];
                neighbor_keys(z0, e, keys);
                bool sep = true;
                for (uint64_t key : keys) {
                    auto it = grid.find(key);
                    if (it == grid.end()) continue;
                    for (size_t j : it->second) {
                        if (!separated(i, j, n, e)) { sep = false; break; }
                    }
                    if (!sep) break;
                }
                if (sep) {
                    grid[cell_key(z0, e)].push_back(i);
                    if (++kept >= cap) break;  // row would land beyond cap: drop it
                }
            }
            if (kept >= cap) break;  // this and all later rows are saturated
            cnts.push_back(kept);
        }
        // fit window: geometric growth over the recorded (sub-cap) rows
        std::vector<double> xs, ys;
        int lo = 0, hi = 0;
        for (size_t n = 1; n < cnts.size(); ++n) {
            bool growing = cnts[n] >= static_cast<long long>(1.3 * static_cast<double>(cnts[n - 1]));
            if (growing && cnts[n - 1] >= 3) {
                if (xs.empty()) lo = static_cast<int>(n);
                hi = static_cast<int>(n + 1);
                if (xs.empty()) {
                    xs.push_back(static_cast<double>(n));  // n indexes cnts, metric length n+1
                    ys.push_back(std::log(static_cast<double>(cnts[n - 1])));
                }
                xs.push_back(static_cast<double>(n + 1));
                ys.push_back(std::log(static_cast<double>(cnts[n])));
            } else if (!xs.empty()) {
                break;
            }
        }
        if (xs.size() >= 3) {
            // early rows are pre-asymptotic (the packing constant is still
            // settling); fit the trailing half of the usable window
            size_t keep = std::max<size_t>(3, (xs.size() + 1) / 2);
            if (keep < xs.size()) {
                xs.erase(xs.begin(), xs.end() - static_cast<long>(keep));
                ys.erase(ys.begin(), ys.end() - static_cast<long>(keep));
                lo = static_cast<int>(xs.front());
            }
            LinFit f = linear_fit(xs, ys);
            det.slopes[ei] = f.slope;
            det.fit_lo[ei] = lo;
            det.fit_hi[ei] = hi;
            slopes.push_back(f.slope);
        } else if (!cnts.empty() && cnts.back() == cnts.front()) {
            // flat counts (e.g. a cloud too coarse to ever split a cell, or a
            // single point): the growth rate really is zero
            slopes.push_back(0.0);
        }
    }
    if (slopes.empty())
        throw NumericalError("entropy_estimate: no epsilon produced a usable growth window");
    std::sort(slopes.begin(), slopes.end());
    return slopes[slopes.size() / 2];
}

SweepResult lyapunov_sweep(const MapSpec& base, const std::string& param,
                           const std::vector<cplx>& grid, int center_index,
                           const std::vector<int>& ring, const SweepOptions& opts,
                           uint64_t seed) {
    if (param != "c" && param != "lambda")
        throw ConfigError("lyapunov_sweep: param must be \"c\" or \"lambda\"");
    if (param == "c" && base.family != Family::Poly1D)
        throw ConfigError("lyapunov_sweep: param \"c\" needs a Poly1D base");
    if (param == "lambda" && base.family != Family::Skew2D)
        throw ConfigError("lyapunov_sweep: param \"lambda\" needs a Skew2D base");

    SweepResult out;
    out.rows.resize(grid.size());
    parallel_for(grid.size(), opts.workers, [&](size_t gi) {
        SweepRow& row = out.rows[gi];
        row.s = grid[gi];
        try {
            MapSpec m = base;
            if (param == "c") {
                m.p[0] = row.s;
            } else {
                if (std::abs(row.s) <= 1.0)
                    throw ConfigError("skew multiplier must satisfy |lambda| > 1");
                m.lambda = row.s;
            }
            Domain V = resolve_domain(m);
            SampleOptions so;
            so.walkers = opts.walkers;
            so.per_walker = opts.per_walker;
            WeightedCloud c = sample_equilibrium(m, V, so, mix64(seed ^ mix64(gi)));
            LyapOptions lo;
            lo.orbit_length = opts.orbit_length;
            lo.samples = opts.samples;
            LyapSpectrum sp = lyapunov(m, c, lo, mix64(seed ^ mix64(gi ^ 0x99)));
            row.h = 2.0 * sp.sum;
            row.se = 2.0 * sp.sum_se;
            row.valid = true;
        } catch (const std::exception& e) {
            row.valid = false;
            row.note = e.what();
        }
    });

    if (center_index >= 0 && static_cast<size_t>(center_index) < out.rows.size() &&
        !ring.empty()) {
        const SweepRow& ctr = out.rows[static_cast<size_t>(center_index)];
        double s = 0.0, v = 0.0;
        size_t n = 0;
        bool all_valid = ctr.valid;
        for (int ri : ring) {
            if (ri < 0 || static_cast<size_t>(ri) >= out.rows.size() ||
                !out.rows[static_cast<size_t>(ri)].valid) {
                all_valid = false;
                break;
            }
            s += out.rows[static_cast<size_t>(ri)].h;
            v += out.rows[static_cast<size_t>(ri)].se * out.rows[static_cast<size_t>(ri)].se;
            ++n;
        }
        if (all_valid && n > 0) {
            out.has_center = true;
            out.center_h = ctr.h;
            out.center_se = ctr.se;
            out.ring_mean = s / static_cast<double>(n);
            out.ring_se = std::sqrt(v) / static_cast<double>(n);
            double sigma = std::sqrt(out.center_se * out.center_se + out.ring_se * out.ring_se);
            out.submean_ok = out.center_h <= out.ring_mean + 3.0 * sigma;
        }
    }
    return out;
}

}  // namespace dynlab
