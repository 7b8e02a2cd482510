#pragma once

#include <cstdint>

namespace kgalign {

/// splitmix64 mix; used to derive independent child seeds from one master
/// seed so that every randomized component owns its own stream.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return mix_seed(mix_seed(master) ^ mix_seed(tag));
}

namespace seed_tag {
constexpr std::uint64_t kVsaG = 1;
constexpr std::uint64_t kVsaNn = 2;
constexpr std::uint64_t kNetwork = 3;
constexpr std::uint64_t kShuffle = 4;
constexpr std::uint64_t kCorpus = 5;
constexpr std::uint64_t kSyntheticKg = 6;
} // namespace seed_tag

} // namespace kgalign
