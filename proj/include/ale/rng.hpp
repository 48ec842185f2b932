#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ale {

using Rng = std::mt19937_64;

// Derives an independent generator for a named sub-stream ("init/Q",
// "shuffle", "synth/enroll", ...) so one seed drives a whole experiment.
inline Rng make_stream(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

// Uniform on the open interval (0, 1).
inline double uniform_open01(Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double x = dist(rng);
    while (x <= 0.0) x = dist(rng);
    return x;
}

}  // namespace ale
