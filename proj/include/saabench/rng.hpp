#pragma once

#include <cstdint>
#include <random>

namespace saabench {

using Rng = std::mt19937_64;

/// What a random stream is used for. Part of the stream key so that, e.g.,
/// the bootstrap draws of a replication never overlap its training sample.
enum class StreamRole : std::uint32_t {
    TrainingSample = 1,
    Bootstrap = 2,
    Mcmc = 3,
    Evaluation = 4,
    Predictive = 5,
    Restart = 6,
};

/// Identifies one independent stream: (experiment seed, replication index, role).
/// The replication index is any caller-chosen 64-bit key; the harness packs
/// (distribution, N, k) into it.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t index = 0;
    StreamRole role = StreamRole::TrainingSample;
    std::uint64_t substream = 0;
};

/// Deterministically seeds a generator from the key. Two distinct keys give
/// unrelated streams; the same key always gives the same stream.
Rng make_stream(const StreamKey& key);

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index, StreamRole role,
                       std::uint64_t substream = 0) {
    return make_stream(StreamKey{master_seed, index, role, substream});
}

/// Packs a small tuple of ids into one replication index.
std::uint64_t pack_index(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace saabench
