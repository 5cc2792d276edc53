#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace peereval {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive decorrelated substream seeds.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a of a string. Seeding per-agent draws from the id hash (instead of
// the agent index) keeps every seeded computation equivariant under
// relabeling: permuting identifiers permutes the results identically.
std::uint64_t fnv1a64(std::string_view s);

// Derive a substream seed from a master seed and up to two tags.
// Substreams let per-agent / per-purpose draws stay deterministic no matter
// in which order they are computed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0);

inline Rng make_rng(std::uint64_t seed, std::uint64_t tag_a = 0, std::uint64_t tag_b = 0) {
    return Rng(substream_seed(seed, tag_a, tag_b));
}

// Stateless counter-style uniform in [0, 1): one high-quality draw per
// (seed, tags) tuple without the cost of seeding a full engine.
inline double prf_uniform(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0,
                          std::uint64_t tag_c = 0) {
    const std::uint64_t u = mix64(substream_seed(seed, tag_a, tag_b) ^ mix64(tag_c + 0x9e3779b97f4a7c15ULL));
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

} // namespace peereval
