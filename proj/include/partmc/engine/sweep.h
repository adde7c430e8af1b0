#pragma once

#include <ostream>
#include <vector>

#include "partmc/engine/render.h"

namespace partmc {

/// Variance across tile x tile blocks of the per-block variance of the error
/// luminance. Blotchy, spatially clustered error scores higher than the same
/// error spread as fine grain.
double structured_noise(const ImageBuffer& image, const ImageBuffer& reference, int tile = 8);

struct SweepConfig {
    std::vector<int> y_sizes{9, 33, 65, 129};
    std::vector<double> radii{8, 24, 44, 128};
    std::vector<uint64_t> seeds{1};
    RenderConfig base;  // algorithm is forced to partitioned
};

struct SweepCell {
    int y_size = 0;
    double radius = 0.0;
    double rmse = 0.0;              // mean over seeds
    double structured_noise = 0.0;  // mean over seeds
};

/// Partitioned render for every (|Y'|, R) pair, scored against `reference`.
std::vector<SweepCell> run_sweep(const Scene& scene, const ImageBuffer& reference, const SweepConfig& config);

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out);

}  // namespace partmc
