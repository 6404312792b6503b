#pragma once

#include <cstdint>
#include <random>

namespace randop {

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replication `replication` under `master_seed`. Pure function of
/// the pair, so replications can run in any order.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t replication) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

/// Uniform on [0, 1) from 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace randop
