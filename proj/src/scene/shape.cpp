#include "partmc/scene/shape.h"

#include <cmath>

namespace partmc {

int Bounds3::longest_axis() const {
    const Vec3 d = hi - lo;
    if (d.x >= d.y && d.x >= d.z)
        return 0;
    return d.y >= d.z ? 1 : 2;
}

bool Bounds3::hit(const Ray& ray, const Vec3& inv_dir, double t_min, double t_max) const {
    for (int axis = 0; axis < 3; ++axis) {
        double t0 = (lo[axis] - ray.origin[axis]) * inv_dir[axis];
        double t1 = (hi[axis] - ray.origin[axis]) * inv_dir[axis];
        if (t0 > t1)
            std::swap(t0, t1);
        // NaN from 0 * inf keeps the interval unchanged.
        t_min = t0 > t_min ? t0 : t_min;
        t_max = t1 < t_max ? t1 : t_max;
        if (t_min > t_max)
            return false;
    }
    return true;
}

Shape Shape::sphere(const Vec3& centre, double radius) {
    Shape s;
    s.type = ShapeType::sphere;
    s.a = centre;
    s.radius = radius;
    return s;
}

Shape Shape::triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2) {
    Shape s;
    s.type = ShapeType::triangle;
    s.a = v0;
    s.b = v1;
    s.c = v2;
    s.normal = normalize(cross(v1 - v0, v2 - v0));
    return s;
}

Shape Shape::quad(const Vec3& corner, const Vec3& edge1, const Vec3& edge2) {
    Shape s;
    s.type = ShapeType::quad;
    s.a = corner;
    s.b = edge1;
    s.c = edge2;
    s.normal = normalize(cross(edge1, edge2));
    return s;
}

std::optional<Shape::Hit> Shape::intersect(const Ray& ray, double t_min, double t_max) const {
    switch (type) {
    case ShapeType::sphere: {
        const Vec3 oc = ray.origin - a;
        const double half_b = dot(oc, ray.direction);
        const double c0 = dot(oc, oc) - radius * radius;
        const double disc = half_b * half_b - c0;
        if (disc < 0.0)
            return std::nullopt;
        const double sq = std::sqrt(disc);
        double t = -half_b - sq;
        if (t <= t_min || t >= t_max) {
            t = -half_b + sq;
            if (t <= t_min || t >= t_max)
                return std::nullopt;
        }
        return Hit{t, (ray.at(t) - a) / radius};
    }
    case ShapeType::triangle: {
        // Moller-Trumbore
        const Vec3 e1 = b - a, e2 = c - a;
        const Vec3 p = cross(ray.direction, e2);
        const double det = dot(e1, p);
        if (std::abs(det) < 1e-14)
            return std::nullopt;
        const double inv = 1.0 / det;
        const Vec3 s = ray.origin - a;
        const double u = dot(s, p) * inv;
        if (u < 0.0 || u > 1.0)
            return std::nullopt;
        const Vec3 q = cross(s, e1);
        const double v = dot(ray.direction, q) * inv;
        if (v < 0.0 || u + v > 1.0)
            return std::nullopt;
        const double t = dot(e2, q) * inv;
        if (t <= t_min || t >= t_max)
            return std::nullopt;
        return Hit{t, normal};
    }
    case ShapeType::quad: {
        const double denom = dot(normal, ray.direction);
        if (std::abs(denom) < 1e-14)
            return std::nullopt;
        const double t = dot(a - ray.origin, normal) / denom;
        if (t <= t_min || t >= t_max)
            return std::nullopt;
        const Vec3 d = ray.at(t) - a;
        // Solve d = u*b + v*c in the plane.
        const double bb = dot(b, b), bc = dot(b, c), cc = dot(c, c);
        const double db = dot(d, b), dc = dot(d, c);
        const double det = bb * cc - bc * bc;
        const double u = (db * cc - dc * bc) / det;
        const double v = (dc * bb - db * bc) / det;
        if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
            return std::nullopt;
        return Hit{t, normal};
    }
    }
    return std::nullopt;
}

Bounds3 Shape::bounds() const {
    Bounds3 bb;
    switch (type) {
    case ShapeType::sphere:
        bb.extend(a - Vec3(radius, radius, radius));
        bb.extend(a + Vec3(radius, radius, radius));
        break;
    case ShapeType::triangle:
        bb.extend(a);
        bb.extend(b);
        bb.extend(c);
        break;
    case ShapeType::quad:
        bb.extend(a);
        bb.extend(a + b);
        bb.extend(a + c);
        bb.extend(a + b + c);
        break;
    }
    // Pad flat boxes so the slab test stays robust.
    bb.lo = bb.lo - Vec3(1e-9, 1e-9, 1e-9);
    bb.hi = bb.hi + Vec3(1e-9, 1e-9, 1e-9);
    return bb;
}

double Shape::area() const {
    switch (type) {
    case ShapeType::sphere: return 4.0 * kPi * radius * radius;
    case ShapeType::triangle: return 0.5 * length(cross(b - a, c - a));
    case ShapeType::quad: return length(cross(b, c));
    }
    return 0.0;
}

void Shape::sample_uniform(double u1, double u2, Vec3& point, Vec3& n) const {
    switch (type) {
    case ShapeType::sphere: {
        const double z = 1.0 - 2.0 * u1;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * kPi * u2;
        n = {r * std::cos(phi), r * std::sin(phi), z};
        point = a + n * radius;
        return;
    }
    case ShapeType::triangle: {
        const double su = std::sqrt(u1);
        const double b0 = 1.0 - su, b1 = u2 * su;
        point = a * b0 + b * b1 + c * (1.0 - b0 - b1);
        n = normal;
        return;
    }
    case ShapeType::quad:
        point = a + b * u1 + c * u2;
        n = normal;
        return;
    }
}

}  // namespace partmc
