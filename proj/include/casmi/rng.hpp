#pragma once

#include <cstdint>

namespace casmi::rng {

/// splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic seed for the substream owned by (replication, variable)
/// under a master seed. Parallel replications never share a stream.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t replication,
                                    std::uint64_t variable) {
    return mix64(mix64(mix64(master) ^ replication) ^
                 (variable * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL));
}

}  // namespace casmi::rng
