#include "dynlab/green1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dynlab/stats.hpp"

namespace dynlab {

GreenValue green(const MapSpec& m, cplx z, int n_max, double tol) {
    if (m.family != Family::Poly1D) throw ConfigError("green: Poly1D maps only");
    int d = m.dt;
    double lead = std::abs(m.p.back());
    // relative size of the sub-leading part; controls the tail bound
    double c = 0.0;
    for (int i = 0; i < d; ++i) c += std::abs(m.p[static_cast<size_t>(i)]);
    c = c / lead + 1.0;
    double r_esc = std::max(2.0 * cauchy_radius(m.p),
                            m.has_domain ? m.domain.outer_radius() : 0.0);

    GreenValue g;
    g.z = z;
    cplx w = z;
    double dn = 1.0;  // d^-n
    for (int n = 0; n <= n_max; ++n) {
        double aw = std::abs(w);
        if (aw > r_esc) {
            // G = d^-n (log|w_n| + log|lead|/(d-1)) with certified tail
            double tail = dn / d * 4.0 * c / aw;
            if (tail < tol || aw > 1e50) {
                g.value = dn * (std::log(aw) + std::log(lead) / (d - 1));
                g.iterations = n;
                g.converged = true;
                return g;
            }
        }
        if (n == n_max) break;
        w = horner(m.p, w);
        dn /= d;
        if (!std::isfinite(std::abs(w)))
            throw NumericalError("green: orbit overflowed before the tail bound closed");
    }
    // never escaped: bounded orbit, G = 0
    if (std::abs(w) <= r_esc) {
        g.value = 0.0;
        g.iterations = n_max;
        g.converged = true;
        return g;
    }
    g.value = dn * (std::log(std::abs(w)) + std::log(lead) / (d - 1));
    g.iterations = n_max;
    g.converged = false;
    return g;
}

std::vector<double> expansion_sequence(const MapSpec& m, const WeightedCloud& cloud,
                                       int n_max) {
    if (m.family != Family::Poly1D) throw ConfigError("expansion_sequence: Poly1D only");
    if (n_max < 1 || cloud.size() == 0)
        throw ConfigError("expansion_sequence: need n_max >= 1 and a nonempty cloud");
    Poly dp = derivative(m.p);
    std::vector<double> best(static_cast<size_t>(n_max), -1e300);
    for (const Point& p : cloud.points) {
        cplx w = p.c[0];
        double acc = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            double g = std::abs(horner(dp, w));
            if (g == 0.0) { acc = -1e300; break; }
            acc += std::log(g);
            best[static_cast<size_t>(n - 1)] = std::max(best[static_cast<size_t>(n - 1)], acc);
            w = horner(m.p, w);
        }
    }
    std::vector<double> out(static_cast<size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        out[static_cast<size_t>(n - 1)] = std::exp(best[static_cast<size_t>(n - 1)] / n);
    return out;
}

HolderReport holder_check(const MapSpec& m, const WeightedCloud& cloud, double alpha,
                          std::vector<double> radii, int centers, uint64_t seed,
                          double fit_tol) {
    if (m.k != 1 || cloud.k != 1) throw ConfigError("holder_check: 1D clouds only");
    cloud.require_probability();
    size_t N = cloud.size();
    if (N < 10) throw ConfigError("holder_check: cloud too small");
    if (centers < 1) throw ConfigError("holder_check: need centers >= 1");

    HolderReport rep;
    rep.alpha = alpha;
    rep.centers = centers;

    double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
    for (const Point& p : cloud.points) {
        re_lo = std::min(re_lo, p.c[0].real());
        re_hi = std::max(re_hi, p.c[0].real());
        im_lo = std::min(im_lo, p.c[0].imag());
        im_hi = std::max(im_hi, p.c[0].imag());
    }
    double extent = std::hypot(re_hi - re_lo, im_hi - im_lo);
    rep.resolution = extent / static_cast<double>(N);

    std::sort(radii.begin(), radii.end());
    std::vector<double> usable;
    for (double r : radii) {
        if (r >= rep.resolution && r > 0.0)
            usable.push_back(r);
        else
            rep.radii_rejected.push_back(r);
    }
    rep.radii_used = usable;
    if (usable.size() < 2) {
        rep.vacuous = true;
        rep.pass = true;
        rep.warning = "fewer than 2 radii above the cloud resolution; check is vacuous";
        return rep;
    }

    // grid index at the largest radius for O(1) neighborhoods
    double cell = usable.back();
    std::map<std::pair<long long, long long>, std::vector<size_t>> grid;
    auto cell_of = [cell](cplx z) {
        return std::make_pair(static_cast<long long>(std::floor(z.real() / cell)),
                              static_cast<long long>(std::floor(z.imag() / cell)));
    };
    for (size_t i = 0; i < N; ++i) grid[cell_of(cloud.points[i].c[0])].push_back(i);

    Rng rng = Rng::stream(seed, {0x401d});
    std::vector<size_t> cidx(static_cast<size_t>(centers));
    for (auto& ci : cidx) ci = static_cast<size_t>(rng.bounded(N));

    std::vector<double> lx, ly;
    for (double r : usable) {
        double sup_mass = 0.0;
        for (size_t ci : cidx) {
            cplx c0 = cloud.points[ci].c[0];
            auto [cx, cy] = cell_of(c0);
            double mass = 0.0;
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    auto it = grid.find({cx + dx, cy + dy});
                    if (it == grid.end()) continue;
                    for (size_t j : it->second)
                        if (std::abs(cloud.points[j].c[0] - c0) <= r) mass += cloud.weights[j];
                }
            sup_mass = std::max(sup_mass, mass);
        }
        if (sup_mass > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(sup_mass));
        }
    }
    if (lx.size() < 2) {
        rep.vacuous = true;
        rep.pass = true;
        rep.warning = "all usable radii carried zero mass; check is vacuous";
        return rep;
    }
    rep.fitted_slope = linear_fit(lx, ly).slope;
    rep.pass = rep.fitted_slope >= alpha - fit_tol;
    return rep;
}

HausdorffResult hausdorff_dimension(const MapSpec& m, const WeightedCloud& cloud) {
    if (m.family != Family::Poly1D) throw ConfigError("hausdorff_dimension: Poly1D only");
    cloud.require_probability();
    Poly dp = derivative(m.p);
    size_t N = cloud.size();
    std::vector<double> vals(N);
    for (size_t i = 0; i < N; ++i) {
        double g = std::abs(horner(dp, cloud.points[i].c[0]));
        if (g <= 0.0) throw NumericalError("hausdorff_dimension: derivative vanished on cloud");
        vals[i] = std::log(g);
    }
    size_t block = (cloud.per_walker > 1 && N % static_cast<size_t>(cloud.per_walker) == 0)
                       ? static_cast<size_t>(cloud.per_walker)
                       : 1;
    MeanSe ms = batch_mean_se(vals, block);
    if (ms.mean <= 0.05)
        throw NumericalError("hausdorff_dimension: log-derivative integral not positive");
    HausdorffResult r;
    r.integral = ms.mean;
    r.integral_se = ms.se;
    r.hd = std::log(static_cast<double>(m.dt)) / ms.mean;
    r.se = std::log(static_cast<double>(m.dt)) * ms.se / (ms.mean * ms.mean);
    return r;
}

}  // namespace dynlab
