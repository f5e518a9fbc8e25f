#include "dynlab/poly.hpp"

#include <algorithm>
#include <cmath>

namespace dynlab {

Poly trim(Poly p) {
    while (p.size() > 1 && p.back() == cplx(0.0)) p.pop_back();
    if (p.empty()) p.push_back(cplx(0.0));
    return p;
}

cplx horner(const Poly& p, cplx z) {
    cplx acc(0.0);
    for (size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
    return acc;
}

void horner2(const Poly& p, cplx z, cplx& val, cplx& der) {
    cplx v(0.0), d(0.0);
    for (size_t i = p.size(); i-- > 0;) {
        d = d * z + v;
        v = v * z + p[i];
    }
    val = v;
    der = d;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return Poly{cplx(0.0)};
    Poly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return trim(std::move(d));
}

Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), cplx(0.0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return trim(std::move(r));
}

Poly multiply(const Poly& a, const Poly& b) {
    if (is_zero(a) || is_zero(b)) return Poly{cplx(0.0)};
    Poly r(a.size() + b.size() - 1, cplx(0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trim(std::move(r));
}

Poly compose(const Poly& outer, const Poly& inner) {
    Poly acc{cplx(0.0)};
    for (size_t i = outer.size(); i-- > 0;) {
        acc = multiply(acc, inner);
        if (acc.empty()) acc.push_back(cplx(0.0));
        acc[0] += outer[i];
        acc = trim(std::move(acc));
    }
    return acc;
}

Poly iterate_poly(const Poly& p, int n) {
    Poly r{cplx(0.0), cplx(1.0)};  // identity
    for (int i = 0; i < n; ++i) r = compose(p, r);
    return r;
}

double cauchy_radius(const Poly& p) {
    int d = degree(p);
    if (d < 1) return 1.0;
    double lead = std::abs(p[d]);
    double m = 0.0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(p[i]) / lead);
    return 1.0 + m;
}

double sup_on_disc(const Poly& p, double R) {
    double s = 0.0, rp = 1.0;
    for (const cplx& c : p) {
        s += std::abs(c) * rp;
        rp *= R;
    }
    return s;
}

cplx ipow(cplx z, int n) {
    cplx r(1.0), b = z;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

}  // namespace dynlab
