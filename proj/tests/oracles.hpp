#pragma once

// Deliberately naive reference implementations for tests. Everything here
// favors obviousness over speed and shares no code with the library paths it
// checks.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dynlab/maps.hpp"
#include "dynlab/types.hpp"

namespace oracles {

using dynlab::cplx;
using dynlab::MapSpec;
using dynlab::Point;

// monomial-by-monomial sum, no Horner
inline cplx naive_poly_eval(const std::vector<cplx>& coeffs, cplx z) {
    cplx s = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        cplx zi = 1.0;
        for (size_t j = 0; j < i; ++j) zi *= z;
        s += coeffs[i] * zi;
    }
    return s;
}

// central finite differences of eval in all four real directions; h chosen
// for ~1e-8 relative accuracy on the supported polynomial families
inline void fd_jacobian(const MapSpec& m, const Point& z, cplx out[2][2], double h = 1e-6) {
    for (int c = 0; c < m.k; ++c) {
        Point zp = z, zm = z;
        zp.c[c] += h;
        zm.c[c] -= h;
        Point fp = eval(m, zp), fm = eval(m, zm);
        Point zpi = z, zmi = z;
        zpi.c[c] += cplx(0.0, h);
        zmi.c[c] -= cplx(0.0, h);
        Point fpi = eval(m, zpi), fmi = eval(m, zmi);
        for (int r = 0; r < m.k; ++r) {
            cplx dx = (fp.c[r] - fm.c[r]) / (2.0 * h);
            cplx dy = (fpi.c[r] - fmi.c[r]) / (2.0 * h);
            // holomorphic derivative: d/dz = (d/dx - i d/dy)/2 applied to f
            out[r][c] = 0.5 * (dx - cplx(0.0, 1.0) * dy);
        }
    }
}

// CDF of the arcsine law on [-2, 2] (the equilibrium distribution of Re z
// for z^2 - 2 on its interval Julia set)
inline double arcsine_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + std::asin(x / 2.0) / std::numbers::pi_v<double>;
}

// mean of f over the unit circle by N-point uniform quadrature (exact for
// trigonometric polynomials of degree < N)
template <typename F>
cplx circle_mean(F&& f, int n = 4096) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) {
        double t = 2.0 * std::numbers::pi_v<double> * j / n;
        s += f(cplx(std::cos(t), std::sin(t)));
    }
    return s / static_cast<double>(n);
}

// greedy maximal (n,eps)-separated count over precomputed orbits, quadratic
// scan; pins the library's grid-accelerated version
inline long long naive_separated_count(const std::vector<std::vector<Point>>& orb, int k,
                                       int n, double eps) {
    std::vector<size_t> kept;
    for (size_t i = 0; i < orb.size(); ++i) {
        bool sep = true;
        for (size_t j : kept) {
            bool apart = false;
            for (int t = 0; t < n; ++t) {
                double d2 = dynlab::abs2(orb[i][static_cast<size_t>(t)].c[0] -
                                         orb[j][static_cast<size_t>(t)].c[0]);
                if (k == 2)
                    d2 += dynlab::abs2(orb[i][static_cast<size_t>(t)].c[1] -
                                       orb[j][static_cast<size_t>(t)].c[1]);
                if (d2 >= eps * eps) { apart = true; break; }
            }
            if (!apart) { sep = false; break; }
        }
        if (sep) kept.push_back(i);
    }
    return static_cast<long long>(kept.size());
}

// Green function of z^2 on the disc: log|z| outside the closed unit disc,
// 0 inside
inline double doubling_green(cplx z) {
    double r = std::abs(z);
    return r <= 1.0 ? 0.0 : std::log(r);
}

// Green function of z^2 - 2 via the Joukowski conjugacy z = w + 1/w
inline double chebyshev_green(cplx z) {
    cplx w = 0.5 * (z + std::sqrt(z * z - 4.0));
    double r = std::abs(w);
    if (r < 1.0) r = 1.0 / r;  // take the outer branch
    return std::log(r);
}

}  // namespace oracles
