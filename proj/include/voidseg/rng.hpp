#pragma once

#include <cmath>
#include <cstdint>

namespace voidseg {

// Deterministic RNG with self-contained draw algorithms so that sampled
// streams do not depend on the standard library's distribution
// implementations. Byte-identical reruns are part of the dataset contract.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {
        // decorrelate small seeds
        next_u64();
        next_u64();
    }

    // splitmix64 step
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform real in [lo, hi)
    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // standard normal via Box-Muller (both values used)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Per-sample seed derivation: a pure function of (master_seed, index) so that
// samples can be generated in parallel and reruns are reproducible.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace voidseg
