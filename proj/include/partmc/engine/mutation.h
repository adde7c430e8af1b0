#pragma once

#include <optional>

#include "partmc/guidance/guidance.h"
#include "partmc/partition/partition.h"

namespace partmc {

struct MutationOutcome {
    std::optional<Path> proposed;
    double acceptance = 0.0;
    bool accepted = false;
};

/// Radial step of the isotropic lens perturbation, log-uniform in [r_min, r_max] pixels.
struct LensParams {
    double r_min = 1.0;
    double r_max = 32.0;
};

/// Angular step of the caustic perturbation, log-uniform in [theta_min, theta_max] radians.
struct CausticParams {
    double theta_min = 1e-4;
    double theta_max = 0.1;
};

/// Everything a chain step reads. Without `partitions` every signature is in
/// the chain's domain (plain MLT); without `guidance` lens moves are isotropic.
struct ChainContext {
    const Scene* scene = nullptr;
    const PartitionSet* partitions = nullptr;
    int partition = 0;
    const GuidanceImage* guidance = nullptr;
    const GBuffer* gbuffer = nullptr;
    const OffsetSet* offsets = nullptr;
    double large_step_probability = 0.3;
    int large_step_attempts = 256;  // draws per large step before giving up
    LensParams lens;
    CausticParams caustic;

    bool in_domain(const Signature& s) const { return !partitions || partitions->contains(partition, s); }
};

/// Re-traces the camera prefix of `path` through `film`, following the same
/// reflect/refract pattern through the specular chain up to the first
/// non-specular vertex, and reattaches the unchanged suffix. nullopt when the
/// new prefix has a different signature or cannot be traced; f is zero when
/// the reconnection segment is occluded.
std::optional<Path> retrace_prefix(const Path& path, Vec2 film, const Scene& scene);

/// x_{s+1} with its normal facing the side the prefix connects from.
ReconnectionVertex reconnection_vertex(const Path& path);

/// Image-plane target of a path, zero when it is not lens perturbable or f is zero.
double image_plane_target(const Path& path, const Scene& scene);

/// Contribution per unit solid angle of the emitted direction at the light
/// vertex (the light-side analogue of the image-plane target); zero when the
/// path is not caustic perturbable or f is zero.
double caustic_target(const Path& path, const Scene& scene);

/// Re-traces a caustic path from its light vertex along `direction` through the
/// same specular pattern to a diffuse point, then connects that point to the
/// camera. nullopt on any pattern change, a miss, or a point off the film.
std::optional<Path> retrace_from_light(const Path& path, const Vec3& direction, const Scene& scene);

/// Film offset of the isotropic lens perturbation for two uniforms.
Vec2 lens_offset(const LensParams& params, double u1, double u2);

/// Rotates the emitted direction by a log-uniform angle around a uniform
/// azimuth; the proposal density depends only on the angle, so it is symmetric.
MutationOutcome caustic_perturbation(const ChainState& state, const ChainContext& ctx, RandomStream& stream);
MutationOutcome lens_perturbation_isotropic(const ChainState& state, const ChainContext& ctx, RandomStream& stream);
MutationOutcome guided_lens_perturbation(const ChainState& state, const ChainContext& ctx, RandomStream& stream);
/// Independence proposal from the large-step sampler, restricted to the domain:
/// draws are repeated until one lands in the domain with nonzero contribution.
/// The probability of choosing a large step in state x is 1 when x admits
/// neither a lens nor a caustic perturbation and ctx.large_step_probability
/// otherwise; that ratio enters the acceptance.
MutationOutcome large_step(ChainState& state, const ChainContext& ctx, RandomStream& stream);

/// Probability of taking a large step from `path`.
double large_step_choice(const Path& path, const ChainContext& ctx);

/// One Metropolis-Hastings step: choose a mutation, accept or reject, update stats.
void mutate(ChainState& state, const ChainContext& ctx);

}  // namespace partmc
