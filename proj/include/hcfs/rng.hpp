#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hcfs {

using Rng = std::mt19937_64;

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for a named sub-stream of the root seed. Every consumer owns a name
// (plus an optional index), so adding a consumer never perturbs the draws of
// existing ones.
constexpr std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                       std::uint64_t index = 0) {
    return mix64(mix64(root ^ fnv1a(name)) + 0x9e3779b97f4a7c15ull * (index + 1));
}

inline Rng make_rng(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
    return Rng(substream_seed(root, name, index));
}

}  // namespace hcfs
