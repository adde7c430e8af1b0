#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "partmc/core/image.h"
#include "partmc/path/tracer.h"

namespace partmc {

/// A pre-pass path reduced to what partitioning needs; the vertices are
/// regenerated from (pixel, seed, emission) on demand.
struct PathRecord {
    Rgb c;              // f / pdf
    double scalar = 0;  // scalar_contribution(c)
    PixelCoord pixel;
    StreamId seed;
    int emission = 0;
};

struct PartitionBuffer {
    Signature signature;
    std::vector<PathRecord> records;  // pass-major, then pixel row-major, then emission order
    double gamma = 0.0;               // filled at the end of the pre-pass
};

using Census = std::map<Signature, PartitionBuffer>;

class GBuffer {
public:
    GBuffer() = default;
    GBuffer(int width, int height) : width_(width), height_(height), texels_(static_cast<std::size_t>(width) * height) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool contains(PixelCoord p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
    FirstHit& at(PixelCoord p) { return texels_[static_cast<std::size_t>(p.y) * width_ + p.x]; }
    const FirstHit& at(PixelCoord p) const { return texels_[static_cast<std::size_t>(p.y) * width_ + p.x]; }
    FirstHit& operator[](std::size_t i) { return texels_[i]; }
    const FirstHit& operator[](std::size_t i) const { return texels_[i]; }
    std::size_t size() const { return texels_.size(); }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<FirstHit> texels_;
};

struct PrepassResult {
    Census census;
    GBuffer gbuffer;
    int width = 0;
    int height = 0;
    int paths_per_pixel = 0;
    uint64_t seed = 0;

    /// Camera samples traced, the N of the normalization estimates.
    uint64_t total_samples() const { return static_cast<uint64_t>(paths_per_pixel) * width * height; }
};

/// Stream of the camera sample (pass, pixel): a pure function of the render seed.
StreamId prepass_stream(uint64_t seed, int pass, PixelCoord pixel, int width, int height);

/// Traces `paths_per_pixel` camera samples per pixel and files every complete
/// path under its signature. Rows are traced in parallel; the record order is
/// fixed, so the result does not depend on the number of threads.
PrepassResult run_prepass(const Scene& scene, int paths_per_pixel, uint64_t seed);

namespace serial {
/// Single-threaded reference for run_prepass.
PrepassResult run_prepass(const Scene& scene, int paths_per_pixel, uint64_t seed);
}  // namespace serial

/// Sum of scalar contributions of the first floor(n/2) records.
double first_half_gamma(const PartitionBuffer& buffer);

/// Regenerates the full path behind a record.
std::optional<Path> replay_record(const Scene& scene, const PathRecord& record);

/// Per-pixel mean contribution of the given buffers' records (sum of C / ppp).
ImageBuffer splat_records(const std::vector<const PartitionBuffer*>& buffers, int width, int height,
                          int paths_per_pixel);

/// CSV with one row per signature: signature,paths,gamma.
void write_census_csv(const Census& census, std::ostream& out);

}  // namespace partmc
