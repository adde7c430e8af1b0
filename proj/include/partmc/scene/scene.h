#pragma once

#include <optional>
#include <string>
#include <vector>

#include "partmc/core/rgb.h"
#include "partmc/scene/bvh.h"
#include "partmc/scene/camera.h"
#include "partmc/scene/material.h"
#include "partmc/scene/shape.h"

namespace partmc {

struct Primitive {
    Shape shape;
    int material = 0;
    Rgb emission;  // non-black marks an area light; emission leaves the front face only

    bool is_emitter() const { return !emission.is_black(); }
};

struct SurfaceHit {
    double t = 0.0;
    Vec3 point;
    Vec3 normal;  // geometric, unoriented
    int prim = -1;
};

struct LightSample {
    Vec3 point;
    Vec3 normal;
    int prim = -1;
    double pdf_area = 0.0;  // selection probability / light area
};

/// Immutable scene: primitives, materials, camera and light distribution.
/// All queries are const and safe to call concurrently.
class Scene {
public:
    Scene(std::string name, Camera camera, std::vector<Material> materials, std::vector<Primitive> primitives);

    const std::string& name() const { return name_; }
    const Camera& camera() const { return camera_; }
    const std::vector<Material>& materials() const { return materials_; }
    const std::vector<Primitive>& primitives() const { return primitives_; }
    const Primitive& primitive(int id) const { return primitives_[id]; }
    const Material& material_of(int prim) const { return materials_[primitives_[prim].material]; }

    std::optional<SurfaceHit> intersect(const Ray& ray) const;
    /// Brute-force reference for the BVH.
    std::optional<SurfaceHit> intersect_linear(const Ray& ray) const;
    /// True if the open segment between two surface points is unobstructed.
    bool visible(const Vec3& a, const Vec3& b) const;

    bool has_lights() const { return !lights_.empty(); }
    const std::vector<int>& lights() const { return lights_; }
    /// Light chosen proportionally to area times emitted luminance, then a uniform point on it.
    LightSample sample_light(double u_select, double u1, double u2) const;
    /// Area density of sample_light at a point of primitive `prim` (0 for non-emitters).
    double light_pdf(int prim) const;
    /// Radiance leaving emitter `prim` at a point with normal `n` toward direction `w`.
    Rgb emitted(int prim, const Vec3& n, const Vec3& w) const;

    /// Distance scale of the scene (diagonal of its bounds).
    double extent() const { return extent_; }

private:
    std::string name_;
    Camera camera_;
    std::vector<Material> materials_;
    std::vector<Primitive> primitives_;
    std::vector<Shape> shapes_;
    Bvh bvh_;
    std::vector<int> lights_;
    std::vector<double> light_cdf_;
    std::vector<double> light_select_;  // per primitive, 0 for non-emitters
    double extent_ = 1.0;
};

/// cos(a) cos(b) / |a - b|^2 with absolute cosines, ignoring visibility.
double geometry_term_unoccluded(const Vec3& pa, const Vec3& na, const Vec3& pb, const Vec3& nb);
/// Geometry term including the binary visibility V(a <-> b).
double geometry_term(const Scene& scene, const Vec3& pa, const Vec3& na, const Vec3& pb, const Vec3& nb);

}  // namespace partmc
