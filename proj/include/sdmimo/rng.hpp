#pragma once

#include <cmath>
#include <cstdint>

#include "sdmimo/common.hpp"

namespace sdmimo {

// Small counter-splittable PRNG (xoshiro-style seeding via splitmix64).
// Simulation trials derive independent streams from (seed, point, trial)
// so results do not depend on scheduling order or worker count.
class Rng {
  public:
    explicit Rng(uint64_t seed) { reseed(seed); }

    static uint64_t mix(uint64_t a, uint64_t b) {
        // splitmix64 step over a combined word
        uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static Rng stream(uint64_t seed, uint64_t point, uint64_t trial) {
        return Rng(mix(mix(seed, point), trial));
    }

    void reseed(uint64_t seed) {
        // splitmix64 expansion of the seed into the xoshiro256++ state
        uint64_t z = seed;
        for (auto& word : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            uint64_t s = z;
            s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
            s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
            word = s ^ (s >> 31);
        }
        have_cached_ = false;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    // standard normal via Box-Muller (cached pair)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    cplx normal_complex() {  // CN(0,1): unit variance per complex sample
        double re = normal();
        double im = normal();
        return cplx(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    Vec normal_vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // uniform direction on the unit sphere in R^n
    Vec sphere_vec(int n) {
        Vec v = normal_vec(n);
        double nrm = v.norm();
        while (nrm < 1e-12) {
            v = normal_vec(n);
            nrm = v.norm();
        }
        return v / nrm;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace sdmimo
