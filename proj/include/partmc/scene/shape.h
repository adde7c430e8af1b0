#pragma once

#include <optional>

#include "partmc/core/math.h"

namespace partmc {

inline constexpr double kRayEpsilon = 1e-4;

struct Bounds3 {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void extend(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
    void extend(const Bounds3& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
    Vec3 centroid() const { return (lo + hi) * 0.5; }
    int longest_axis() const;
    /// Slab test against [t_min, t_max].
    bool hit(const Ray& ray, const Vec3& inv_dir, double t_min, double t_max) const;
};

enum class ShapeType { sphere, triangle, quad };

/// Geometric primitive. Sphere: a = centre. Triangle: a, b, c = vertices.
/// Quad (parallelogram): a = corner, b / c = edge vectors; normal = cross(b, c).
struct Shape {
    ShapeType type = ShapeType::sphere;
    Vec3 a, b, c;
    double radius = 0.0;
    Vec3 normal;  // precomputed for planar shapes

    static Shape sphere(const Vec3& centre, double radius);
    static Shape triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2);
    static Shape quad(const Vec3& corner, const Vec3& edge1, const Vec3& edge2);

    struct Hit {
        double t;
        Vec3 normal;  // unoriented geometric normal at the hit
    };
    std::optional<Hit> intersect(const Ray& ray, double t_min, double t_max) const;

    Bounds3 bounds() const;
    double area() const;
    /// Uniform point on the surface and its geometric normal.
    void sample_uniform(double u1, double u2, Vec3& point, Vec3& normal) const;
    Vec3 normal_at(const Vec3& p) const { return type == ShapeType::sphere ? normalize(p - a) : normal; }
};

}  // namespace partmc
