#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "partmc/engine/mutation.h"

namespace partmc {

enum class Algorithm { pt, mlt, partitioned };

struct RenderConfig {
    Algorithm algorithm = Algorithm::partitioned;
    double mutations_per_pixel = 32.0;
    int spp = 64;            // path tracing only
    int prepass_ppp = 16;    // pre-pass camera samples per pixel
    int K = 10;
    int chains = 0;          // plain MLT chain count; 0 means K + 1
    int y_size = 129;
    double radius = 24.0;
    double epsilon = kDefaultVisibilityEpsilon;
    KernelKind kernel = KernelKind::sparse;
    bool guided = true;      // partitioned: guided or isotropic lens moves
    uint64_t seed = 1;
    int burn_in = 1024;
    double large_step_probability = 0.3;
    int large_step_attempts = 256;
    double complementary_floor = 0.01;
    std::size_t memory_cap_bytes = std::size_t{512} << 20;
    LensParams lens;

    void validate() const;
};

struct ChainReport {
    int partition = 0;
    std::string signatures;
    double b = 0.0;
    double P = 0.0;
    uint64_t steps = 0;
    MutationStats stats;
};

struct RenderResult {
    ImageBuffer image;
    double b = 0.0;            // total normalization (sum of b_i for the partitioned run)
    double mean_se = 0.0;      // path tracing: standard error of the image mean luminance
    std::vector<ChainReport> chains;
    std::map<std::string, double> seconds;  // wall clock per phase
    PartitionSet partitions;                // partitioned only
    std::vector<GuidanceImage> guidance;    // partitioned only, aligned with partitions
};

/// Deterministic proportional split of `total` steps: weights P(i) over members
/// with b > 0 and a reservoir, the complement raised to at least `floor` (the
/// others renormalized), every eligible member at least one step, remainders by
/// largest fractional part. Sums to `total` exactly when total >= eligible count.
std::vector<uint64_t> allocate_budget(const PartitionSet& set, uint64_t total, double floor = 0.01);

/// Path tracing with `spp` samples per pixel, rows in parallel.
RenderResult render_pt(const Scene& scene, int spp, uint64_t seed);
namespace serial {
RenderResult render_pt(const Scene& scene, int spp, uint64_t seed);
}  // namespace serial

/// Plain path-space MLT: isotropic lens moves and large steps over every signature.
RenderResult run_mlt(const Scene& scene, const RenderConfig& config);

/// Pre-pass, partition selection, guidance, one chain per partition, sum of images.
RenderResult run_partitioned(const Scene& scene, const RenderConfig& config);

/// Dispatches on config.algorithm.
RenderResult render(const Scene& scene, const RenderConfig& config);

/// One chain of `steps` mutations splatting (scale / steps) f / f* per step.
/// Independent chains are run in parallel, each into its own buffer, and the
/// buffers are summed in chain order, so the image does not depend on the
/// number of threads.
struct ChainJob {
    ChainContext ctx;
    const Partition* partition = nullptr;
    RandomStream stream;
    uint64_t steps = 0;
    double scale = 0.0;  // b * W * H
    int burn_in = 0;
};

struct ChainRun {
    ImageBuffer image;
    std::vector<MutationStats> stats;
};

ChainRun run_chains(const std::vector<ChainJob>& jobs, int width, int height);
namespace serial {
ChainRun run_chains(const std::vector<ChainJob>& jobs, int width, int height);
}  // namespace serial

}  // namespace partmc
