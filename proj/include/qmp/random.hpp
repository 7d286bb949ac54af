#pragma once

#include <cstdint>
#include <initializer_list>

namespace qmp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Hashes a seed together with a tuple of stream labels. Used both for
/// counter-based draws and for deriving independent child seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t label : labels) {
        h = splitmix64(h ^ splitmix64(label + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

/// Top 53 bits mapped to [0, 1).
inline double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace qmp
