#include "dynlab/roots.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "dynlab/rng.hpp"

namespace dynlab {

namespace {

constexpr int kMaxIters = 200;
constexpr double kStepTol = 1e-13;

uint64_t hash_coeffs(const Poly& p) {
    uint64_t h = mix64(p.size());
    for (const cplx& c : p) {
        h = mix64(h ^ std::bit_cast<uint64_t>(c.real()));
        h = mix64(h ^ std::bit_cast<uint64_t>(c.imag()));
    }
    return h;
}

std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
    // citardauq form to avoid cancellation on the small root
    cplx disc = std::sqrt(b * b - 4.0 * a * c);
    cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    std::vector<cplx> r;
    if (q == cplx(0.0)) {
        r = {cplx(0.0), -b / a};
    } else {
        r = {q / a, c / q};
    }
    return r;
}

}  // namespace

std::vector<cplx> nth_roots(cplx a, int d) {
    std::vector<cplx> out;
    out.reserve(d);
    double r = std::pow(std::abs(a), 1.0 / d);
    double t0 = std::arg(a) / d;
    for (int j = 0; j < d; ++j) {
        double t = t0 + 2.0 * std::numbers::pi_v<double> * j / d;
        out.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return out;
}

std::vector<cplx> poly_roots(const Poly& p0) {
    Poly p = trim(p0);
    int d = degree(p);
    if (d < 1) throw NumericalError("poly_roots: constant polynomial has no roots");
    if (d == 1) return {-p[0] / p[1]};
    if (d == 2) return quadratic_roots(p[2], p[1], p[0]);

    auto pure_power = [](const Poly& q, int dq) {
        for (int i = 1; i < dq; ++i)
            if (q[static_cast<size_t>(i)] != cplx(0.0)) return false;
        return true;
    };
    // exact shortcut: a_d z^d + a_0
    if (pure_power(p, d)) return nth_roots(-p[0] / p[d], d);

    // strip roots at the origin so Aberth works on a polynomial with p(0) != 0
    int zeros = 0;
    while (zeros < d && p[zeros] == cplx(0.0)) ++zeros;
    std::vector<cplx> out(zeros, cplx(0.0));
    if (zeros > 0) {
        p.erase(p.begin(), p.begin() + zeros);
        d -= zeros;
        if (d == 0) return out;
        if (d <= 2) {
            std::vector<cplx> rest = (d == 1) ? std::vector<cplx>{-p[0] / p[1]}
                                              : quadratic_roots(p[2], p[1], p[0]);
            out.insert(out.end(), rest.begin(), rest.end());
            return out;
        }
        // stripping may expose a pure power (e.g. z^(q+1) - z -> z^q - 1),
        // where Aberth's near-symmetric start stalls but exact roots exist
        if (pure_power(p, d)) {
            std::vector<cplx> rest = nth_roots(-p[0] / p[d], d);
            out.insert(out.end(), rest.begin(), rest.end());
            return out;
        }
    }

    double R = cauchy_radius(p);
    double scale = 1.0;
    for (const cplx& c : p) scale = std::max(scale, std::abs(c));

    std::vector<cplx> z(d);
    auto init = [&](Rng& rng, double jitter) {
        for (int i = 0; i < d; ++i) {
            double t = 2.0 * std::numbers::pi_v<double> * (i + 0.25) / d;
            double r = 0.8 * R * (1.0 + 0.1 * ((i * 7) % 5));
            z[i] = cplx(r * std::cos(t), r * std::sin(t));
            if (jitter > 0.0)
                z[i] += jitter * R * cplx(rng.u01() - 0.5, rng.u01() - 0.5);
        }
    };

    Rng rng(hash_coeffs(p) ^ 0xab32f00dULL);
    init(rng, 0.0);

    int restarts = 0;
    double prev_max_step = 1e300;
    int stagnant = 0;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        double max_step = 0.0;
        for (int i = 0; i < d; ++i) {
            cplx v, dv;
            horner2(p, z[i], v, dv);
            if (v == cplx(0.0)) continue;
            cplx ni;
            if (dv == cplx(0.0)) {
                ni = cplx(1e-8 * R, 1e-8 * R);  // nudge off the critical point
            } else {
                ni = v / dv;
            }
            cplx s(0.0);
            for (int j = 0; j < d; ++j)
                if (j != i) {
                    cplx diff = z[i] - z[j];
                    if (diff == cplx(0.0)) diff = cplx(1e-14 * R);
                    s += 1.0 / diff;
                }
            cplx den = 1.0 - ni * s;
            cplx step = (std::abs(den) < 1e-14) ? ni : ni / den;
            z[i] -= step;
            double rel = std::abs(step) / (1.0 + std::abs(z[i]));
            // NaN must register as non-convergence, not vanish in the max
            if (!std::isfinite(rel)) rel = 1e300;
            max_step = std::max(max_step, rel);
        }
        if (max_step <= kStepTol) {
            out.insert(out.end(), z.begin(), z.end());
            return out;
        }
        if (max_step > 0.5 * prev_max_step) {
            if (++stagnant > 40) {
                if (++restarts > 3)
                    throw NumericalError("poly_roots: Aberth iteration failed to converge");
                init(rng, 0.3);
                stagnant = 0;
                prev_max_step = 1e300;
                continue;
            }
        } else {
            stagnant = 0;
        }
        prev_max_step = std::max(max_step, 1e-300);
    }
    throw NumericalError("poly_roots: iteration cap reached without convergence");
}

std::vector<ClusteredRoot> cluster_roots(const std::vector<cplx>& roots, double tol) {
    std::vector<ClusteredRoot> out;
    std::vector<cplx> sums;
    for (const cplx& r : roots) {
        bool merged = false;
        for (size_t i = 0; i < out.size(); ++i) {
            if (std::abs(r - out[i].value) <= tol * (1.0 + std::abs(r))) {
                sums[i] += r;
                out[i].multiplicity += 1;
                out[i].value = sums[i] / static_cast<double>(out[i].multiplicity);
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back({r, 1});
            sums.push_back(r);
        }
    }
    return out;
}

}  // namespace dynlab
