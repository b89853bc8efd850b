// Deterministic random number generation for all simulations.
//
// Everything here is specified bit-for-bit so that a given seed yields the
// same stream on every platform and standard library. std:: distributions
// are deliberately not used: their output sequences are implementation
// defined, which would break byte-identical experiment reruns.
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace umac {

inline constexpr double kPi = 3.14159265358979323846;

// SplitMix64 step, used for seeding and for deriving sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ engine seeded through SplitMix64. Gaussian variates come from
// the basic Box-Muller transform (fixed two-uniform consumption per pair).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : root_seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
        have_cached_gauss_ = false;
        cached_gauss_ = 0.0;
    }

    std::uint64_t root_seed() const { return root_seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Unbiased integer on [0, n) via rejection on the top of the range.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Standard normal pair (Box-Muller). Consumes exactly two uniforms.
    std::pair<double, double> gaussian_pair() {
        // 1 - u keeps the log argument in (0,1], avoiding log(0).
        const double r = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
        const double theta = 2.0 * kPi * uniform01();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    // Single standard normal; caches the second Box-Muller output.
    double gaussian() {
        if (have_cached_gauss_) {
            have_cached_gauss_ = false;
            return cached_gauss_;
        }
        auto [a, b] = gaussian_pair();
        cached_gauss_ = b;
        have_cached_gauss_ = true;
        return a;
    }

    // Independent sub-stream keyed by (root seed, stream id). Used to give
    // each trial chunk its own generator so results do not depend on how
    // trials are batched or scheduled.
    Rng derive(std::uint64_t stream_id) const {
        std::uint64_t sm = root_seed_ ^ (0x6a09e667f3bcc909ull + stream_id);
        std::uint64_t mixed = splitmix64(sm);
        return Rng(mixed ^ (stream_id * 0x9e3779b97f4a7c15ull));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    std::uint64_t root_seed_;
    double cached_gauss_;
    bool have_cached_gauss_;
};

}  // namespace umac
