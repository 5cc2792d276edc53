#include "peereval/rng.hpp"

namespace peereval {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) ^ mix64(tag_a) ^ mix64(~tag_b));
}

} // namespace peereval
