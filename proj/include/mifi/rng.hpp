#pragma once

#include <cstdint>
#include <vector>

#include "mifi/error.hpp"

namespace mifi {

// Counter-based generator: value i is a pure function of (seed, i), so any
// stream can be forked or replayed independently of draw order elsewhere.
// The mixing function is the splitmix64 finalizer.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    // 64 uniform bits.
    std::uint64_t next_u64() { return mix(seed_ + (counter_++) * GOLDEN); }

    // Uniform double in [0,1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in (0,1]; safe as a log() argument.
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Draws two uniforms per call and caches
    // nothing, keeping the stream position a pure function of call count.
    double next_normal();

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    // Child generator with an independent stream. Forking never perturbs the
    // parent's counter, so fork(k) is reproducible regardless of interleaving.
    Rng fork(std::uint64_t stream) const {
        return Rng(mix(seed_ ^ mix(stream + FORK_SALT)));
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t FORK_SALT = 0xA0761D6478BD642Full;

    static std::uint64_t mix(std::uint64_t z) {
        z += GOLDEN;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t counter_;
};

// n draws from N(mean, std^2). std must be >= 0.
std::vector<float> rng_normal(Rng& rng, std::size_t n, double mean, double std);

} // namespace mifi
