#pragma once

#include <cstdint>
#include <cmath>

namespace nlsnf {

// Counter-based deterministic generator (splitmix64 finalizer). Draw i of
// stream `seed` depends only on (seed, i), so streams extend consistently
// when more draws are requested later.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t rng_draw(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(seed ^ splitmix64(counter + 0x632BE59BD9B4E019ull));
}

/// Uniform in [0,1) with 53 random bits.
inline double rng_uniform(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(rng_draw(seed, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes counters 2*i and 2*i+1.
inline double rng_normal(std::uint64_t seed, std::uint64_t counter) {
    double u1 = rng_uniform(seed, 2 * counter);
    double u2 = rng_uniform(seed, 2 * counter + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Sequential convenience wrapper around the counter-based draws.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {}
    double uniform() { return rng_uniform(seed_, counter_++); }
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
    std::uint64_t bits() { return rng_draw(seed_, counter_++); }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace nlsnf
