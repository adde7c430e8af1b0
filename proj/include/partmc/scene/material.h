#pragma once

#include <string>

#include "partmc/core/math.h"
#include "partmc/core/rgb.h"

namespace partmc {

enum class MaterialKind { diffuse, mirror, glass };

/// Heckbert-style vertex classes.
enum class VertexClass : char { eye = 'E', diffuse = 'D', specular = 'S', light = 'L' };

struct Material {
    std::string name;
    MaterialKind kind = MaterialKind::diffuse;
    Rgb albedo{0.5};
    double ior = 1.5;  // glass only

    bool is_specular() const { return kind != MaterialKind::diffuse; }
    VertexClass vertex_class() const { return is_specular() ? VertexClass::specular : VertexClass::diffuse; }
};

/// Result of sampling a BSDF. For specular events `value` and `pdf` are the
/// coefficients of the delta distribution (value = throughput / |cos wo|,
/// pdf = discrete event probability), so value*|cos|/pdf is the usual weight.
struct BsdfSample {
    Vec3 wo;
    Rgb value;
    double pdf = 0.0;
    bool specular = false;
    bool transmitted = false;
};

// Direction conventions: wi points from the vertex toward the previous vertex,
// wo toward the next one; n is the unoriented geometric normal.

Rgb bsdf_eval(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n);
double bsdf_pdf(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n);
/// u_event picks reflection vs refraction for glass; (u1, u2) the direction for diffuse.
BsdfSample bsdf_sample(const Material& m, const Vec3& wi, const Vec3& n, double u_event, double u1, double u2);

/// Unpolarised Fresnel reflectance for a dielectric; cos_i measured on the incident side.
double fresnel_dielectric(double cos_i, double eta_i, double eta_t);

/// Cosine-weighted direction in the hemisphere around unit `n`.
Vec3 sample_cosine_hemisphere(const Vec3& n, double u1, double u2);

}  // namespace partmc
