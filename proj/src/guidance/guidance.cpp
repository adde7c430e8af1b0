#include "partmc/guidance/guidance.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace partmc {

double GuidanceImage::visibility(PixelCoord p) const {
    return scalar_contribution(D.at(p.x, p.y)) > epsilon ? 1.0 : epsilon;
}

GuidanceImage build_guidance(const ImageBuffer& splat, const GBuffer& gbuffer, int partition, double epsilon,
                             const AtrousParams& params) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("build_guidance: epsilon must be positive");
    GuidanceImage g{partition, atrous_denoise(splat, gbuffer, params), epsilon};
    const double peak = g.D.max_luminance();
    if (peak > 0.0)
        g.D.scale(1.0 / peak);
    return g;
}

OffsetSet OffsetSet::from_half(std::vector<PixelOffset> half, double radius) {
    OffsetSet set;
    set.radius = radius;
    set.offsets = half;
    set.offsets.push_back({0, 0});
    for (const PixelOffset& o : half)
        set.offsets.push_back(-o);
    return set;
}

OffsetSet build_offsets(int size, double radius, uint64_t sequence_start) {
    if (size < 3 || size % 2 == 0)
        throw std::invalid_argument("build_offsets: size must be odd and at least 3");
    if (!(radius >= 1.0))
        throw std::invalid_argument("build_offsets: radius must be at least 1 pixel");
    std::vector<PixelOffset> half;
    for (int i = 0; i < (size - 1) / 2; ++i) {
        const Vec2 p = ld_point(sequence_start + static_cast<uint64_t>(i));
        half.push_back(map_to_disk_offset(p.x, p.y, radius));
    }
    return OffsetSet::from_half(std::move(half), radius);
}

OffsetSet build_full_offsets(double radius) {
    if (!(radius >= 1.0))
        throw std::invalid_argument("build_full_offsets: radius must be at least 1 pixel");
    const int r = static_cast<int>(std::floor(radius));
    std::vector<PixelOffset> half;
    for (int dy = 0; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if ((dy > 0 || dx > 0) && dx * dx + dy * dy <= radius * radius)
                half.push_back({dx, dy});
    return OffsetSet::from_half(std::move(half), radius);
}

double CandidateSet::weight_of(PixelCoord pixel) const {
    double w = 0.0;
    for (const Candidate& c : candidates)
        if (c.pixel == pixel)
            w += c.weight;
    return w;
}

double candidate_base_weight(const FirstHit& texel, const ReconnectionVertex& x, double visibility) {
    if (!texel.valid)
        return 0.0;
    // a pixel only partly covered by the light may have its center elsewhere,
    // so V'_j rather than the texel decides whether the light is reached
    if (x.terminal)
        return scalar_contribution(texel.g) * visibility;
    if (texel.emitter)
        return 0.0;
    const Vec3 d = x.position - texel.position;
    const double d2 = dot(d, d);
    if (!(d2 > 0.0))
        return 0.0;
    const Vec3 w = d / std::sqrt(d2);
    const double cos_j = std::max(0.0, dot(texel.normal, w));
    const double cos_x = std::max(0.0, -dot(x.normal, w));
    return scalar_contribution(texel.g * texel.albedo * kInvPi) * cos_j * cos_x / d2 * visibility;
}

CandidateSet candidate_weights(PixelCoord center, const OffsetSet& offsets, const GuidanceImage& guidance,
                               const GBuffer& gbuffer, const ReconnectionVertex& x) {
    CandidateSet set;
    set.center = center;
    if (!gbuffer.contains(center))
        return set;
    set.candidates.reserve(offsets.size());
    double peak = 0.0;
    for (const PixelOffset& o : offsets.offsets) {
        const PixelCoord p{center.x + o.dx, center.y + o.dy};
        double w = -1.0;  // off-image marker
        if (gbuffer.contains(p)) {
            w = candidate_base_weight(gbuffer.at(p), x, guidance.visibility(p));
            peak = std::max(peak, w);
        }
        set.candidates.push_back({p, w});
    }
    const double floor = kWeightFloor * peak;
    for (Candidate& c : set.candidates) {
        if (c.weight < 0.0)
            c.weight = 0.0;
        else
            c.weight = peak > 0.0 ? std::max(c.weight, floor) : 1.0;
        set.total += c.weight;
    }
    return set;
}

CandidateDraw sample_candidate(const CandidateSet& set, double u) {
    if (set.empty())
        throw std::invalid_argument("sample_candidate: empty candidate set");
    const double target = u * set.total;
    double acc = 0.0;
    std::size_t pick = set.candidates.size();
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
        acc += set.candidates[i].weight;
        if (target < acc) {
            pick = i;
            break;
        }
    }
    if (pick == set.candidates.size())  // rounding at u -> 1
        for (std::size_t i = set.candidates.size(); i-- > 0;)
            if (set.candidates[i].weight > 0.0) {
                pick = i;
                break;
            }
    const PixelCoord p = set.candidates[pick].pixel;
    return {pick, p, set.probability_of(p)};
}

double guided_acceptance(double pi_old, double pi_new, double w_old_in_new, double w_new_in_old, double total_old,
                         double total_new) {
    if (!(pi_old > 0.0))
        throw std::logic_error("guided_acceptance: current state has zero contribution");
    if (!(pi_new > 0.0) || !(w_old_in_new > 0.0) || !(total_new > 0.0))
        return 0.0;
    if (!(w_new_in_old > 0.0) || !(total_old > 0.0))
        throw std::logic_error("guided_acceptance: forward proposal had zero probability");
    const double a = (pi_new / pi_old) * (w_old_in_new / total_new) / (w_new_in_old / total_old);
    return std::min(1.0, a);
}

}  // namespace partmc
