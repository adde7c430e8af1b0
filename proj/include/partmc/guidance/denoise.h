#pragma once

#include <cstdint>
#include <vector>

#include "partmc/core/image.h"
#include "partmc/path/prepass.h"

namespace partmc {

struct AtrousParams {
    int iterations = 5;
    double sigma_normal = 0.1;  // on the cosine distance 1 - n_p . n_q
    double sigma_albedo = 0.2;  // on the albedo difference norm
    double sigma_depth = 0.5;   // on the depth difference relative to the centre depth
};

/// Furthest pixel a filter with `iterations` levels reads from: 2 * (2^iterations - 1).
int atrous_footprint(int iterations);

/// Pixels with a nonzero value, dilated by `radius` in the max norm.
std::vector<uint8_t> dilated_support(const ImageBuffer& image, int radius);

/// Edge-avoiding a-trous wavelet filter: B3-spline taps [1,4,6,4,1]/16 at
/// dilation 2^i, each tap weighted by normal, albedo and depth similarity of
/// the GBuffer. Only pixels within the filter footprint of a nonzero pixel are
/// processed; the rest provably stay zero. Rows run in parallel.
ImageBuffer atrous_denoise(const ImageBuffer& image, const GBuffer& gbuffer, const AtrousParams& params = {});

namespace serial {
ImageBuffer atrous_denoise(const ImageBuffer& image, const GBuffer& gbuffer, const AtrousParams& params = {});
}  // namespace serial

}  // namespace partmc
