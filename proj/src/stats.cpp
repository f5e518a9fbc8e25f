#include "dynlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dynlab {

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double v = 0.0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    v /= static_cast<double>(r.n - 1);
    r.se = std::sqrt(v / static_cast<double>(r.n));
    return r;
}

MeanSe batch_mean_se(const std::vector<double>& xs, size_t block) {
    if (block < 2 || xs.size() < 2 * block) return mean_se(xs);
    size_t nb = xs.size() / block;
    std::vector<double> bm(nb);
    for (size_t b = 0; b < nb; ++b) {
        double s = 0.0;
        for (size_t i = 0; i < block; ++i) s += xs[b * block + i];
        bm[b] = s / static_cast<double>(block);
    }
    MeanSe r = mean_se(bm);
    r.n = xs.size();
    return r;
}

LinFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    LinFit f;
    f.n = std::min(xs.size(), ys.size());
    if (f.n < 2) return f;
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < f.n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(f.n);
    my /= static_cast<double>(f.n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < f.n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r2 = 0.0;
    for (size_t i = 0; i < f.n; ++i) {
        double e = ys[i] - (f.intercept + f.slope * xs[i]);
        r2 += e * e;
    }
    f.rms_residual = std::sqrt(r2 / static_cast<double>(f.n));
    return f;
}

double ks_uniform(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    if (n == 0) return 0.0;
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double lo = static_cast<double>(i) / static_cast<double>(n);
        double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(xs[i] - lo, hi - xs[i]));
    }
    return d;
}

void fit_decay(DecaySeries& s) {
    std::vector<double> xs, ys;
    for (const auto& r : s.rows) {
        if (r.v > std::max(2.0 * r.se, 1e-13)) {
            xs.push_back(static_cast<double>(r.n));
            ys.push_back(std::log(r.v));
        }
    }
    s.fit_points = xs.size();
    if (xs.size() < 2) {
        s.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        s.fit_residual = 0.0;
        return;
    }
    LinFit f = linear_fit(xs, ys);
    s.fitted_rate = std::exp(f.slope);
    s.fit_residual = f.rms_residual;
}

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_int(long long v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

}  // namespace dynlab
