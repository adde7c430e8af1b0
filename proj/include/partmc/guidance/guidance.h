#pragma once

#include <cstdint>
#include <vector>

#include "partmc/core/low_discrepancy.h"
#include "partmc/guidance/denoise.h"

namespace partmc {

inline constexpr double kDefaultVisibilityEpsilon = 1e-3;
inline constexpr double kWeightFloor = 1e-8;  // relative to the largest in-bounds weight

/// Denoised contribution image of one partition, normalized to max luminance 1.
struct GuidanceImage {
    int partition = 0;
    ImageBuffer D;
    double epsilon = kDefaultVisibilityEpsilon;

    /// Visibility surrogate: 1 where D is above epsilon, epsilon elsewhere.
    double visibility(PixelCoord p) const;
};

GuidanceImage build_guidance(const ImageBuffer& splat, const GBuffer& gbuffer, int partition,
                             double epsilon = kDefaultVisibilityEpsilon, const AtrousParams& params = {});

enum class KernelKind { sparse, full };

/// Pixel shifts shared by every pixel of a render. The first half is free, the
/// middle entry is (0,0) and the second half negates the first in order, so the
/// neighbourhood relation is symmetric.
struct OffsetSet {
    std::vector<PixelOffset> offsets;
    double radius = 0.0;

    static OffsetSet from_half(std::vector<PixelOffset> half, double radius);
    std::size_t size() const { return offsets.size(); }
};

/// Sparse set: the first (size-1)/2 offsets are Halton points from
/// `sequence_start` mapped onto the radius-R disk.
OffsetSet build_offsets(int size, double radius, uint64_t sequence_start = 1);
/// Every integer shift within the disk.
OffsetSet build_full_offsets(double radius);

/// Reconnection vertex x_{s+1} as seen by the candidate weights.
struct ReconnectionVertex {
    Vec3 position;
    Vec3 normal;            // facing the side the prefix connects from
    bool terminal = false;  // the first non-specular vertex is the light itself
};

struct Candidate {
    PixelCoord pixel;
    double weight = 0.0;
};

struct CandidateSet {
    PixelCoord center;
    std::vector<Candidate> candidates;  // aligned with the offsets
    double total = 0.0;

    bool empty() const { return !(total > 0.0); }
    /// Summed weight of the entries at `pixel` (duplicate offsets add up).
    double weight_of(PixelCoord pixel) const;
    double probability_of(PixelCoord pixel) const { return empty() ? 0.0 : weight_of(pixel) / total; }
};

/// Unfloored weight of pixel j: luminance of G_j rho_j / pi times
/// cos_j cos' / d^2 times V'_j, or luminance of G_j times V'_j for a terminal
/// reconnection. Zero for invalid texels and back-facing geometry, and for
/// emitter texels unless the reconnection is terminal.
double candidate_base_weight(const FirstHit& texel, const ReconnectionVertex& x, double visibility);

/// Weights of center + delta for every delta; in-bounds weights are floored at
/// 1e-8 of the largest (all 1 if every base weight is zero), off-image ones are 0.
CandidateSet candidate_weights(PixelCoord center, const OffsetSet& offsets, const GuidanceImage& guidance,
                               const GBuffer& gbuffer, const ReconnectionVertex& x);

struct CandidateDraw {
    std::size_t index = 0;
    PixelCoord pixel;
    double probability = 0.0;  // of proposing this pixel
};

/// Categorical draw proportional to the weights. Requires a nonempty set.
CandidateDraw sample_candidate(const CandidateSet& set, double u);

/// min(1, (pi_new / pi_old) * (w_old / total_new) / (w_new / total_old)) where
/// w_old is the weight of the old pixel in the new neighbourhood and w_new the
/// weight of the new pixel in the old one.
double guided_acceptance(double pi_old, double pi_new, double w_old_in_new, double w_new_in_old, double total_old,
                         double total_new);

}  // namespace partmc
