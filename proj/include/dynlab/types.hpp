#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dynlab {

using cplx = std::complex<double>;

// Point in C^k, k in {1,2}. c[1] is ignored when k == 1; the owning map
// carries the dimension.
struct Point {
    cplx c[2]{};

    Point() = default;
    explicit Point(cplx z) : c{z, {}} {}
    Point(cplx z1, cplx z2) : c{z1, z2} {}

    cplx& operator[](int i) { return c[i]; }
    const cplx& operator[](int i) const { return c[i]; }
};

inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline double dist(const Point& a, const Point& b, int k) {
    double s = abs2(a.c[0] - b.c[0]);
    if (k == 2) s += abs2(a.c[1] - b.c[1]);
    return std::sqrt(s);
}

inline double norm_of(const Point& a, int k) {
    double s = abs2(a.c[0]);
    if (k == 2) s += abs2(a.c[1]);
    return std::sqrt(s);
}

// 1x1 or 2x2 complex matrix (derivative of a map); a[i][j] = d f_i / d z_j.
struct Mat2 {
    int k = 1;
    cplx a[2][2]{};

    static Mat2 identity(int k) {
        Mat2 m;
        m.k = k;
        m.a[0][0] = 1.0;
        if (k == 2) m.a[1][1] = 1.0;
        return m;
    }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    Mat2 r;
    r.k = x.k;
    if (x.k == 1) {
        r.a[0][0] = x.a[0][0] * y.a[0][0];
        return r;
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.a[i][j] = x.a[i][0] * y.a[0][j] + x.a[i][1] * y.a[1][j];
    return r;
}

inline cplx det(const Mat2& m) {
    if (m.k == 1) return m.a[0][0];
    return m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[1][0];
}

inline double frobenius2(const Mat2& m) {
    double s = abs2(m.a[0][0]);
    if (m.k == 2) s += abs2(m.a[0][1]) + abs2(m.a[1][0]) + abs2(m.a[1][1]);
    return s;
}

// Moduli of the two eigenvalues of a 2x2 complex matrix, descending.
// For k == 1 the second entry is unused.
inline void eigen_moduli(const Mat2& m, double out[2]) {
    if (m.k == 1) {
        out[0] = std::abs(m.a[0][0]);
        out[1] = 0.0;
        return;
    }
    cplx tr = m.a[0][0] + m.a[1][1];
    cplx d = det(m);
    cplx disc = std::sqrt(tr * tr - 4.0 * d);
    cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    // evaluate the larger root first, recover the other from the product
    if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
    if (std::abs(l1) > 0.0) l2 = d / l1;
    out[0] = std::abs(l1);
    out[1] = std::abs(l2);
    if (out[0] < out[1]) std::swap(out[0], out[1]);
}

// Config/schema problems and violated operation preconditions: CLI exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (non-convergence, inconsistent solves, starved
// estimators): CLI exit 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dynlab
