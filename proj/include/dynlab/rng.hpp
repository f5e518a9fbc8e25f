#pragma once

#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

#include "dynlab/types.hpp"

namespace dynlab {

// splitmix64 finalizer; used to derive independent substream seeds.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic RNG stream. Every parallel task derives its own stream from
// (seed, path...), so results are independent of worker count and schedule.
// All distributions are implemented on top of raw 64-bit draws; nothing here
// depends on libstdc++'s distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    static Rng stream(uint64_t seed, std::initializer_list<uint64_t> path) {
        uint64_t h = mix64(seed ^ 0xdb4f0b9175ae2165ULL);
        for (uint64_t p : path) h = mix64(h ^ mix64(p));
        return Rng(h);
    }

    uint64_t bits() { return eng_(); }

    // uniform in [0,1) with 53-bit resolution
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n); Lemire reduction, deterministic
    uint64_t bounded(uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(eng_()) * n;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < n) {
            uint64_t t = -n % n;
            while (lo < t) {
                m = static_cast<__uint128_t>(eng_()) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // uniform on the closed unit disc (area measure)
    cplx unit_disc() {
        double r = std::sqrt(u01());
        double t = 2.0 * std::numbers::pi_v<double> * u01();
        return cplx(r * std::cos(t), r * std::sin(t));
    }

    cplx unit_circle() {
        double t = 2.0 * std::numbers::pi_v<double> * u01();
        return cplx(std::cos(t), std::sin(t));
    }

    // uniform on annulus r_in <= |z| <= r_out (area measure)
    cplx annulus(double r_in, double r_out) {
        double u = u01();
        double r = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
        double t = 2.0 * std::numbers::pi_v<double> * u01();
        return cplx(r * std::cos(t), r * std::sin(t));
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dynlab
