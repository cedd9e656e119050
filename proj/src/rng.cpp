#include "saabench/rng.hpp"

#include <array>

namespace saabench {

Rng make_stream(const StreamKey& key) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(key.master_seed), hi(key.master_seed), lo(key.index),
                      hi(key.index),       static_cast<std::uint32_t>(key.role),
                      lo(key.substream),   hi(key.substream),   0x5aab3e7cu};
    return Rng(seq);
}

std::uint64_t pack_index(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // splitmix64 finalizer applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    return h;
}

}  // namespace saabench
