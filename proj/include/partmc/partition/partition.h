#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "partmc/path/prepass.h"

namespace partmc {

/// Which half of every buffer estimates gamma; the other half feeds b and the
/// initialization reservoir.
enum class HalfSplit { first_for_gamma, second_for_gamma };

struct ReservoirEntry {
    double scalar = 0.0;
    StreamId seed;
    PixelCoord pixel;
    int emission = 0;
    Signature signature;
};

struct Partition {
    int id = 0;
    std::vector<Signature> signatures;  // census signatures; for the complement, the ones not selected
    bool complementary = false;
    double gamma = 0.0;
    double P = 0.0;
    double b = 0.0;
    std::vector<ReservoirEntry> reservoir;
};

struct PartitionSet {
    std::vector<Partition> partitions;  // K selected members, then the complement
    std::vector<Signature> selected;    // sorted, for membership of the complement
    int K = 0;

    Partition& complementary() { return partitions.back(); }
    const Partition& complementary() const { return partitions.back(); }
    /// Index of the member that owns a signature; the complement also owns
    /// signatures the census never saw.
    int owner(const Signature& s) const;
    bool contains(int member, const Signature& s) const { return owner(s) == member; }
};

/// Sum of scalar contributions over the gamma half of a buffer.
double gamma(const PartitionBuffer& buffer, HalfSplit split = HalfSplit::first_for_gamma);

struct SelectionLimits {
    std::size_t memory_cap_bytes = std::size_t{512} << 20;
    int width = 0;   // image size of the guidance images; 0 disables the cap
    int height = 0;
};

/// Picks the K largest-gamma signatures (ties by signature order) as singleton
/// partitions and groups the rest into the complement; P(i) = gamma_i / sum
/// over all K+1 members. K shrinks with a warning when fewer signatures have
/// positive gamma or the guidance images would exceed the memory cap.
PartitionSet select_partitions(const Census& census, int K, const SelectionLimits& limits = {},
                               HalfSplit split = HalfSplit::first_for_gamma);

/// b_i = second-half scalar mass of the member's buffers / (N_total / 2).
double estimate_b(const Partition& partition, const Census& census, uint64_t total_samples,
                  HalfSplit split = HalfSplit::first_for_gamma);

/// The same formula over every signature of the census.
double unpartitioned_b(const Census& census, uint64_t total_samples, HalfSplit split = HalfSplit::first_for_gamma);

/// Fills b and the reservoirs; selected members with b = 0 are merged into the
/// complement with a warning.
void finalize_partitions(PartitionSet& set, const Census& census, uint64_t total_samples,
                         HalfSplit split = HalfSplit::first_for_gamma);

/// select_partitions followed by finalize_partitions.
PartitionSet build_partitions(const PrepassResult& prepass, int K, const SelectionLimits& limits = {},
                              HalfSplit split = HalfSplit::first_for_gamma);

/// Index drawn with probability proportional to scalar, from one uniform.
std::size_t pick_reservoir(const std::vector<ReservoirEntry>& reservoir, double u);

enum class MutationType { lens, guided, caustic, large_step };
inline constexpr int kMutationTypes = 4;

struct MutationStats {
    std::array<uint64_t, kMutationTypes> proposed{};
    std::array<uint64_t, kMutationTypes> accepted{};

    void record(MutationType t, bool acc) {
        ++proposed[static_cast<int>(t)];
        accepted[static_cast<int>(t)] += acc;
    }
    uint64_t rejected(MutationType t) const { return proposed[static_cast<int>(t)] - accepted[static_cast<int>(t)]; }
    double acceptance_rate(MutationType t) const;
    MutationStats& operator+=(const MutationStats& o);
};

struct ChainState {
    Path current;
    double fstar = 0.0;  // scalar f in area measure
    double pi = 0.0;     // target of the small moves: image-plane or emission-direction contribution
    double q = -1.0;     // large-step density of current, computed on demand
    int partition = 0;
    RandomStream stream;
    MutationStats stats;
};

/// Sets current, fstar and pi from a path.
void assign_path(ChainState& state, Path path, const Scene& scene);

/// Resamples a reservoir record proportionally to its contribution, replays it
/// and runs `burn_in` discarded steps of `step`. Throws std::logic_error when a
/// replay does not reproduce the recorded signature.
ChainState init_chain(const Partition& partition, const Scene& scene, int burn_in, RandomStream stream,
                      const std::function<void(ChainState&)>& step);

/// CSV: partition,signatures,gamma,P,b,reservoir (signatures joined by '|').
void write_partition_report(const PartitionSet& set, std::ostream& out);

}  // namespace partmc
