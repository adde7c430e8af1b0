#pragma once

#include <cstdint>

namespace partmc {

/// Stateless 64-bit finalizer (SplitMix64 / Stafford variant 13).
constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Identifies a random stream: everything needed to regenerate a path.
struct StreamId {
    uint64_t seed = 0;
    uint64_t stream = 0;

    constexpr bool operator==(const StreamId&) const = default;
};

/// Counter-based generator. Draw n of stream (seed, id) is a pure function of
/// (seed, id, n), so a stream can be recreated anywhere from its StreamId.
class RandomStream {
public:
    RandomStream() : RandomStream(0, 0) {}
    RandomStream(uint64_t seed, uint64_t stream) : id_{seed, stream} {
        key_lo_ = mix64(seed ^ 0x6a09e667f3bcc909ULL) + mix64(stream + 0xbb67ae8584caa73bULL);
        key_hi_ = mix64(key_lo_ ^ mix64(stream ^ 0x3c6ef372fe94f82bULL) ^ (seed << 1));
    }
    explicit RandomStream(StreamId id) : RandomStream(id.seed, id.stream) {}

    uint64_t next_u64() { return draw(counter_++); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) { return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n; }

    /// Derive an independent child stream (used to fork per-chain streams).
    RandomStream split(uint64_t child) const { return RandomStream(mix64(id_.seed ^ 0xa54ff53a5f1d36f1ULL) ^ id_.stream, child); }

    StreamId id() const { return id_; }
    uint64_t counter() const { return counter_; }

private:
    uint64_t draw(uint64_t n) const { return mix64(mix64(n + key_lo_) ^ key_hi_); }

    StreamId id_;
    uint64_t key_lo_ = 0;
    uint64_t key_hi_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace partmc
