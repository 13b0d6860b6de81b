#include "mifi/rng.hpp"

#include <cmath>

namespace mifi {

double Rng::next_normal() {
    // u1 in (0,1] so log(u1) is finite; u2 in [0,1).
    double u1 = next_double_open();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw InvalidInputError("next_below: n must be positive");
    // Rejection sampling to avoid modulo bias.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::vector<float> rng_normal(Rng& rng, std::size_t n, double mean, double std) {
    if (std < 0.0) throw InvalidInputError("rng_normal: std must be non-negative");
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(mean + std * rng.next_normal());
    }
    return out;
}

} // namespace mifi
