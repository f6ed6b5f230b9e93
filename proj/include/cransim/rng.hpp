// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace cransim {

// splitmix64 step, used for seeding and stream derivation
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from (master, tag, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= tag * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= index + 0x632be59bd9b4e019ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

// xoshiro256++, seeded via splitmix64. Portable and reproducible across
// platforms, unlike the distributions in <random>.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
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

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is negligible for the small n used here, but stay exact
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace cransim
