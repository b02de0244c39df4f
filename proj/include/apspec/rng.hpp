#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace apspec {

// Stateless mixer used for seed derivation and hash-addressed bit streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// mt19937_64 is fully specified by the standard; uniforms are built from raw
// bits so results do not depend on library-specific distribution code.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential with the given rate; argument of log stays in (0,1].
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  private:
    std::mt19937_64 eng_;
};

} // namespace apspec
