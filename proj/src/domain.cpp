#include "dynlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynlab {

namespace {
constexpr double kPi = std::numbers::pi_v<double>;
}

void Domain::check() const {
    if (k != 1 && k != 2) throw ConfigError("domain: dimension must be 1 or 2");
    auto positive = [](double r) { return r > 0.0 && std::isfinite(r); };
    switch (shape) {
        case Shape::Ball:
            if (radii.size() != 1 || !positive(radii[0]))
                throw ConfigError("domain: Ball needs radii = [R], R > 0");
            break;
        case Shape::Polydisc:
            if (radii.size() != static_cast<size_t>(k))
                throw ConfigError("domain: Polydisc needs one radius per coordinate");
            for (double r : radii)
                if (!positive(r)) throw ConfigError("domain: Polydisc radii must be > 0");
            break;
        case Shape::Annulus2D:
            if (k != 2) throw ConfigError("domain: Annulus2D requires dimension 2");
            if (radii.size() != 4)
                throw ConfigError("domain: Annulus2D needs radii = [in1, out1, in2, out2]");
            for (int c = 0; c < 2; ++c) {
                double in = radii[2 * c], out = radii[2 * c + 1];
                if (!positive(in) || !positive(out) || in >= out)
                    throw ConfigError("domain: Annulus2D needs 0 < inner < outer per coordinate");
            }
            break;
    }
}

double Domain::boundary_margin(const Point& z) const {
    switch (shape) {
        case Shape::Ball: {
            double d = 0.0;
            for (int i = 0; i < k; ++i) d += abs2(z.c[i] - center.c[i]);
            return radii[0] - std::sqrt(d);
        }
        case Shape::Polydisc: {
            double m = 1e300;
            for (int i = 0; i < k; ++i)
                m = std::min(m, radii[i] - std::abs(z.c[i] - center.c[i]));
            return m;
        }
        case Shape::Annulus2D: {
            double m = 1e300;
            for (int i = 0; i < 2; ++i) {
                double r = std::abs(z.c[i] - center.c[i]);
                m = std::min(m, std::min(r - radii[2 * i], radii[2 * i + 1] - r));
            }
            return m;
        }
    }
    return -1.0;
}

double Domain::outer_radius() const {
    switch (shape) {
        case Shape::Ball:
            return radii[0];
        case Shape::Polydisc:
            return *std::max_element(radii.begin(), radii.end());
        case Shape::Annulus2D:
            return std::max(radii[1], radii[3]);
    }
    return 0.0;
}

double Domain::diameter() const {
    if (shape == Shape::Ball) return 2.0 * radii[0];
    // product shapes: Euclidean diameter of the bounding polydisc
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        double r = (shape == Shape::Polydisc) ? radii[i] : radii[2 * i + 1];
        s += 4.0 * r * r;
    }
    return std::sqrt(s);
}

double Domain::volume() const {
    switch (shape) {
        case Shape::Ball:
            if (k == 1) return kPi * radii[0] * radii[0];
            // unit 4-ball volume is pi^2/2
            return 0.5 * kPi * kPi * std::pow(radii[0], 4);
        case Shape::Polydisc: {
            double v = 1.0;
            for (int i = 0; i < k; ++i) v *= kPi * radii[i] * radii[i];
            return v;
        }
        case Shape::Annulus2D: {
            double v = 1.0;
            for (int i = 0; i < 2; ++i)
                v *= kPi * (radii[2 * i + 1] * radii[2 * i + 1] - radii[2 * i] * radii[2 * i]);
            return v;
        }
    }
    return 0.0;
}

Point Domain::sample_uniform(Rng& rng) const {
    Point p;
    switch (shape) {
        case Shape::Ball:
            if (k == 1) {
                p.c[0] = center.c[0] + radii[0] * rng.unit_disc();
            } else {
                // uniform in the 4-ball: Gaussian direction, radius ~ u^(1/4)
                double g[4];
                double n2 = 0.0;
                do {
                    n2 = 0.0;
                    for (double& gi : g) {
                        gi = rng.normal();
                        n2 += gi * gi;
                    }
                } while (n2 == 0.0);
                double r = radii[0] * std::pow(rng.u01(), 0.25) / std::sqrt(n2);
                p.c[0] = center.c[0] + cplx(g[0], g[1]) * r;
                p.c[1] = center.c[1] + cplx(g[2], g[3]) * r;
            }
            break;
        case Shape::Polydisc:
            for (int i = 0; i < k; ++i) p.c[i] = center.c[i] + radii[i] * rng.unit_disc();
            break;
        case Shape::Annulus2D:
            for (int i = 0; i < 2; ++i)
                p.c[i] = center.c[i] + rng.annulus(radii[2 * i], radii[2 * i + 1]);
            break;
    }
    return p;
}

Point Domain::boundary_point(int i, int n, Rng& rng) const {
    Point p = center;
    double t = 2.0 * kPi * (static_cast<double>(i) + 0.5) / std::max(1, n);
    switch (shape) {
        case Shape::Ball:
            if (k == 1) {
                p.c[0] += radii[0] * cplx(std::cos(t), std::sin(t));
            } else {
                // 3-sphere: structured angle on one coordinate pair, random split
                double a = 0.5 * kPi * rng.u01();
                double t2 = 2.0 * kPi * rng.u01();
                p.c[0] += radii[0] * std::cos(a) * cplx(std::cos(t), std::sin(t));
                p.c[1] += radii[0] * std::sin(a) * cplx(std::cos(t2), std::sin(t2));
            }
            break;
        case Shape::Polydisc: {
            int face = i % k;
            for (int c = 0; c < k; ++c) {
                if (c == face)
                    p.c[c] += radii[c] * cplx(std::cos(t), std::sin(t));
                else
                    p.c[c] += radii[c] * rng.unit_disc();
            }
            break;
        }
        case Shape::Annulus2D: {
            int face = i % 4;  // coord 0 in/out, coord 1 in/out
            int fc = face / 2;
            double r = radii[2 * fc + (face % 2)];
            for (int c = 0; c < 2; ++c) {
                if (c == fc)
                    p.c[c] += r * cplx(std::cos(t), std::sin(t));
                else
                    p.c[c] += rng.annulus(radii[2 * c], radii[2 * c + 1]);
            }
            break;
        }
    }
    return p;
}

}  // namespace dynlab
