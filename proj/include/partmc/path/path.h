#pragma once

#include <compare>
#include <string>
#include <string_view>

#include <boost/container/static_vector.hpp>

#include "partmc/core/image.h"
#include "partmc/core/random.h"
#include "partmc/core/rgb.h"
#include "partmc/scene/scene.h"

namespace partmc {

/// Longest path, counting the camera and light vertices.
inline constexpr int kMaxVertices = 12;

struct PathVertex {
    Vec3 position;
    Vec3 normal;  // geometric, unoriented; the camera vertex stores the view direction
    int prim = -1;
    VertexClass cls = VertexClass::eye;
    bool transmitted = false;  // specular vertices: the outgoing ray refracted
};

/// Camera-first sequence of vertex classes, e.g. "EDSSL" for a caustic seen on
/// a diffuse surface (written LSSDE in light-first notation).
class Signature {
public:
    Signature() = default;
    explicit Signature(std::string classes) : classes_(std::move(classes)) {}

    const std::string& str() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    bool empty() const { return classes_.empty(); }
    VertexClass operator[](std::size_t i) const { return static_cast<VertexClass>(classes_[i]); }
    bool has_specular() const { return classes_.find('S') != std::string::npos; }

    bool operator==(const Signature&) const = default;
    std::strong_ordering operator<=>(const Signature& o) const { return classes_.compare(o.classes_) <=> 0; }

private:
    std::string classes_;
};

using VertexList = boost::container::static_vector<PathVertex, kMaxVertices>;

struct Path {
    VertexList vertices;
    Vec2 film;              // continuous image position of x0 -> x1
    Rgb f;                  // measurement contribution, camera importance included
    double pdf = 0.0;       // generation density of the strategy that produced it
    StreamId seed;          // stream that regenerates this path
    int emission_index = 0; // position among the paths emitted by one trace

    int last() const { return static_cast<int>(vertices.size()) - 1; }
    PixelCoord pixel() const { return Camera::pixel_of(film); }
    Signature signature() const;
    /// Index of the first vertex after the camera that is not specular.
    int first_nonspecular() const;
};

// Evaluation follows the delta convention of the BSDF module: specular vertices
// contribute their delta coefficient, so f / pdf is the usual path weight.

/// f = W_e G(x0,x1) prod[fr G] Le including visibility of every segment.
Rgb path_contribution(const Path& path, const Scene& scene);
/// Same product with every visibility term taken as 1.
Rgb path_contribution_unoccluded(const Path& path, const Scene& scene);

/// S = W_e G(x0,x1) prod_{k<s}[fr_k G_k] fr_s. Requires 1 <= s <= M-1.
Rgb prefix_contribution(const Path& path, int s, const Scene& scene);
/// alpha = G(x_s,x_{s+1}) prod_{k>s}[fr_k G_k] Le, with visibility; S * alpha = f.
Rgb suffix_contribution(const Path& path, int s, const Scene& scene);

/// Contribution expressed per unit film area at x1 instead of per unit area
/// at the first non-specular vertex: f / |dA(x_s) / dA_film|. This is the
/// target density of image-plane mutations (visibility not re-checked).
Rgb image_plane_contribution(const Path& path, const Scene& scene);
/// |dA_film / dA(x_s)| along the camera's specular chain in the delta convention.
double image_plane_jacobian(const Path& path, const Scene& scene);

/// True when the vertex after the first non-specular one is diffuse or a light
/// (or the path ends there), so the camera prefix can move while the rest stays.
bool lens_perturbable(const Path& path);

/// E D S+ L: a diffuse point seen directly that receives light only through a
/// specular chain, so it can be moved from the light side instead.
bool caustic_perturbable(const Path& path);

/// Contribution per unit solid angle of the emitted direction at the light
/// vertex, the light vertex itself held fixed: f |dA(x1) / dw_M|. Exact for
/// chains whose refractions pair up (the relative index cancels).
Rgb emission_direction_contribution(const Path& path, const Scene& scene);

}  // namespace partmc
