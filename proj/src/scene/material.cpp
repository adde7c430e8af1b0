#include "partmc/scene/material.h"

#include <algorithm>
#include <cmath>
#include <optional>

namespace partmc {

namespace {

// Tolerance for "wo is the ideal specular direction" on delta lobes.
constexpr double kSpecularMatch = 1.0 - 1e-7;

std::optional<Vec3> refract(const Vec3& wi, const Vec3& n, double eta) {
    // wi and n on the same side; eta = eta_i / eta_t.
    const double cos_i = dot(wi, n);
    const double sin2_t = eta * eta * std::max(0.0, 1.0 - cos_i * cos_i);
    if (sin2_t >= 1.0)
        return std::nullopt;
    const double cos_t = std::sqrt(1.0 - sin2_t);
    return normalize(-wi * eta + n * (eta * cos_i - cos_t));
}

struct GlassGeometry {
    Vec3 n_facing;  // normal on the side of wi
    double eta_i, eta_t;
    double fresnel;
};

GlassGeometry glass_geometry(const Material& m, const Vec3& wi, const Vec3& n) {
    const bool entering = dot(wi, n) > 0.0;
    GlassGeometry g;
    g.n_facing = entering ? n : -n;
    g.eta_i = entering ? 1.0 : m.ior;
    g.eta_t = entering ? m.ior : 1.0;
    g.fresnel = fresnel_dielectric(dot(wi, g.n_facing), g.eta_i, g.eta_t);
    return g;
}

}  // namespace

double fresnel_dielectric(double cos_i, double eta_i, double eta_t) {
    cos_i = std::clamp(cos_i, 0.0, 1.0);
    const double sin_t = eta_i / eta_t * std::sqrt(std::max(0.0, 1.0 - cos_i * cos_i));
    if (sin_t >= 1.0)
        return 1.0;
    const double cos_t = std::sqrt(std::max(0.0, 1.0 - sin_t * sin_t));
    const double r_par = (eta_t * cos_i - eta_i * cos_t) / (eta_t * cos_i + eta_i * cos_t);
    const double r_perp = (eta_i * cos_i - eta_t * cos_t) / (eta_i * cos_i + eta_t * cos_t);
    return 0.5 * (r_par * r_par + r_perp * r_perp);
}

Vec3 sample_cosine_hemisphere(const Vec3& n, double u1, double u2) {
    const double r = std::sqrt(u1);
    const double phi = 2.0 * kPi * u2;
    const Vec3 local{r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
    return normalize(Frame(n).to_world(local));
}

Rgb bsdf_eval(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n) {
    switch (m.kind) {
    case MaterialKind::diffuse: {
        const double ci = dot(wi, n), co = dot(wo, n);
        return (ci * co > 0.0) ? m.albedo * kInvPi : Rgb{};
    }
    case MaterialKind::mirror: {
        const Vec3 ideal = reflect(-wi, n);
        if (dot(ideal, wo) < kSpecularMatch)
            return {};
        return m.albedo / std::abs(dot(wo, n));
    }
    case MaterialKind::glass: {
        const GlassGeometry g = glass_geometry(m, wi, n);
        const double co = dot(wo, g.n_facing);
        if (co > 0.0) {
            if (dot(reflect(-wi, g.n_facing), wo) < kSpecularMatch)
                return {};
            return m.albedo * (g.fresnel / co);
        }
        const auto t = refract(wi, g.n_facing, g.eta_i / g.eta_t);
        if (!t || dot(*t, wo) < kSpecularMatch)
            return {};
        return m.albedo * ((1.0 - g.fresnel) / -co);
    }
    }
    return {};
}

double bsdf_pdf(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n) {
    switch (m.kind) {
    case MaterialKind::diffuse: {
        const double ci = dot(wi, n), co = dot(wo, n);
        return (ci * co > 0.0) ? std::abs(co) * kInvPi : 0.0;
    }
    case MaterialKind::mirror:
        return dot(reflect(-wi, n), wo) < kSpecularMatch ? 0.0 : 1.0;
    case MaterialKind::glass: {
        const GlassGeometry g = glass_geometry(m, wi, n);
        if (dot(wo, g.n_facing) > 0.0)
            return dot(reflect(-wi, g.n_facing), wo) < kSpecularMatch ? 0.0 : g.fresnel;
        const auto t = refract(wi, g.n_facing, g.eta_i / g.eta_t);
        return (!t || dot(*t, wo) < kSpecularMatch) ? 0.0 : 1.0 - g.fresnel;
    }
    }
    return 0.0;
}

BsdfSample bsdf_sample(const Material& m, const Vec3& wi, const Vec3& n, double u_event, double u1, double u2) {
    BsdfSample s;
    switch (m.kind) {
    case MaterialKind::diffuse: {
        const Vec3 nf = dot(wi, n) > 0.0 ? n : -n;
        s.wo = sample_cosine_hemisphere(nf, u1, u2);
        const double co = dot(s.wo, nf);
        if (co <= 0.0)
            return {};
        s.value = m.albedo * kInvPi;
        s.pdf = co * kInvPi;
        return s;
    }
    case MaterialKind::mirror: {
        s.wo = reflect(-wi, n);
        s.value = m.albedo / std::abs(dot(s.wo, n));
        s.pdf = 1.0;
        s.specular = true;
        return s;
    }
    case MaterialKind::glass: {
        const GlassGeometry g = glass_geometry(m, wi, n);
        s.specular = true;
        if (u_event < g.fresnel) {
            s.wo = reflect(-wi, g.n_facing);
            s.value = m.albedo * (g.fresnel / std::abs(dot(s.wo, n)));
            s.pdf = g.fresnel;
            return s;
        }
        const auto t = refract(wi, g.n_facing, g.eta_i / g.eta_t);
        if (!t)
            return {};  // unreachable: fresnel == 1 under total internal reflection
        s.wo = *t;
        s.value = m.albedo * ((1.0 - g.fresnel) / std::abs(dot(s.wo, n)));
        s.pdf = 1.0 - g.fresnel;
        s.transmitted = true;
        return s;
    }
    }
    return s;
}

}  // namespace partmc
