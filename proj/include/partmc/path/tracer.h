#pragma once

#include <optional>
#include <vector>

#include "partmc/path/path.h"

namespace partmc {

/// Attributes of the first non-specular vertex seen through a pixel.
struct FirstHit {
    Vec3 position;
    Vec3 normal;       // oriented toward the incoming camera chain
    Rgb albedo;        // zero for emitters
    Rgb g;             // (1 / A_film) times the specular throughputs of the camera chain
    int depth = 0;     // vertex index of the first non-specular vertex
    double distance = 0.0;  // length of the camera chain
    bool valid = false;
    bool emitter = false;
};

inline constexpr int kRussianRouletteStart = 5;

/// Unidirectional path tracer used by the pre-pass. One camera sample through
/// `pixel` (subpixel position drawn from `stream`) yields every complete path
/// found: one per next-event connection at a diffuse vertex and one when a
/// BSDF-sampled ray hits an emitter. Each path carries f and the combined
/// density p_bsdf + p_nee, so f / pdf is its balance-heuristic weighted
/// estimate. Paths are in emission order and the trace is a pure function of
/// the stream, so any path can be regenerated from (stream id, emission index).
std::vector<Path> trace_path(const Scene& scene, PixelCoord pixel, RandomStream stream, FirstHit* first_hit = nullptr);

/// Regenerates the emission_index-th path of a pre-pass trace.
std::optional<Path> replay_path(const Scene& scene, PixelCoord pixel, StreamId seed, int emission_index);

// Independence proposal used by large steps: with probability 1/2 a pure BSDF
// walk that must hit an emitter, otherwise a BSDF walk that stops at each
// diffuse vertex with probability 1/2 and connects to a sampled light point.

inline constexpr double kNeeStopProbability = 0.5;

/// Draws a fresh path over the whole film; nullopt when the walk fails.
std::optional<Path> sample_large_step(const Scene& scene, RandomStream& stream);

/// Density of the pure BSDF walk for a complete path (delta convention).
double bsdf_walk_density(const Path& path, const Scene& scene);
/// Density of the stop-and-connect walk.
double nee_walk_density(const Path& path, const Scene& scene);
/// Mixture density of sample_large_step: (bsdf + nee) / 2.
double large_step_density(const Path& path, const Scene& scene);

}  // namespace partmc
