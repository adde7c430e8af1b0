#include "partmc/path/path.h"

#include <cassert>

namespace partmc {

namespace {

Vec3 direction(const Vec3& from, const Vec3& to) { return normalize(to - from); }

Rgb vertex_bsdf(const Path& p, int k, const Scene& scene) {
    const PathVertex& v = p.vertices[k];
    return bsdf_eval(scene.material_of(v.prim), direction(v.position, p.vertices[k - 1].position),
                     direction(v.position, p.vertices[k + 1].position), v.normal);
}

double segment_g(const Path& p, int k) {
    const PathVertex& a = p.vertices[k];
    const PathVertex& b = p.vertices[k + 1];
    return geometry_term_unoccluded(a.position, a.normal, b.position, b.normal);
}

double camera_term(const Path& p, const Scene& scene) {
    return scene.camera().film_jacobian(p.vertices[1].position, p.vertices[1].normal) / scene.camera().film_area();
}

Rgb light_term(const Path& p, const Scene& scene) {
    const int m = p.last();
    const PathVertex& l = p.vertices[m];
    if (l.cls != VertexClass::light)
        return {};
    return scene.emitted(l.prim, l.normal, direction(l.position, p.vertices[m - 1].position));
}

bool segments_visible(const Path& p, int from, int to, const Scene& scene) {
    for (int k = from; k < to; ++k)
        if (!scene.visible(p.vertices[k].position, p.vertices[k + 1].position))
            return false;
    return true;
}

}  // namespace

Signature Path::signature() const {
    std::string s(vertices.size(), 'E');
    for (std::size_t i = 0; i < vertices.size(); ++i)
        s[i] = static_cast<char>(vertices[i].cls);
    return Signature(std::move(s));
}

int Path::first_nonspecular() const {
    int s = 1;
    while (s < last() && vertices[s].cls == VertexClass::specular)
        ++s;
    return s;
}

Rgb path_contribution_unoccluded(const Path& path, const Scene& scene) {
    const int m = path.last();
    if (m < 1)
        return {};
    Rgb f{camera_term(path, scene)};
    for (int k = 1; k < m; ++k)
        f *= vertex_bsdf(path, k, scene) * segment_g(path, k);
    return f * light_term(path, scene);
}

Rgb path_contribution(const Path& path, const Scene& scene) {
    if (!segments_visible(path, 0, path.last(), scene))
        return {};
    return path_contribution_unoccluded(path, scene);
}

Rgb prefix_contribution(const Path& path, int s, const Scene& scene) {
    assert(s >= 1 && s <= path.last() - 1);
    if (!segments_visible(path, 0, s, scene))
        return {};
    Rgb S{camera_term(path, scene)};
    for (int k = 1; k < s; ++k)
        S *= vertex_bsdf(path, k, scene) * segment_g(path, k);
    return S * vertex_bsdf(path, s, scene);
}

Rgb suffix_contribution(const Path& path, int s, const Scene& scene) {
    const int m = path.last();
    assert(s >= 1 && s <= m - 1);
    if (!segments_visible(path, s, m, scene))
        return {};
    Rgb a{segment_g(path, s)};
    for (int k = s + 1; k < m; ++k)
        a *= vertex_bsdf(path, k, scene) * segment_g(path, k);
    return a * light_term(path, scene);
}

Rgb image_plane_contribution(const Path& path, const Scene& scene) {
    const int m = path.last();
    if (m < 1)
        return {};
    const int s = path.first_nonspecular();
    Rgb c{1.0 / scene.camera().film_area()};
    for (int k = 1; k < s; ++k) {
        const PathVertex& v = path.vertices[k];
        const Vec3 wo = direction(v.position, path.vertices[k + 1].position);
        c *= vertex_bsdf(path, k, scene) * std::abs(dot(wo, v.normal));
    }
    if (s == m)
        return c * light_term(path, scene);
    c *= vertex_bsdf(path, s, scene) * segment_g(path, s);
    for (int k = s + 1; k < m; ++k)
        c *= vertex_bsdf(path, k, scene) * segment_g(path, k);
    return c * light_term(path, scene);
}

double image_plane_jacobian(const Path& path, const Scene& scene) {
    double j = scene.camera().film_jacobian(path.vertices[1].position, path.vertices[1].normal);
    const int s = path.first_nonspecular();
    for (int k = 1; k < s; ++k) {
        const PathVertex& a = path.vertices[k];
        const PathVertex& b = path.vertices[k + 1];
        const Vec3 d = b.position - a.position;
        const double dist2 = length_squared(d);
        j *= std::abs(dot(b.normal, d)) / (std::sqrt(dist2) * dist2);
    }
    return j;
}

bool lens_perturbable(const Path& path) {
    const int m = path.last();
    if (m < 1)
        return false;
    const int s = path.first_nonspecular();
    if (s == m)
        return path.vertices[m].cls == VertexClass::light;
    if (path.vertices[s].cls != VertexClass::diffuse)
        return false;
    const VertexClass next = path.vertices[s + 1].cls;
    return next == VertexClass::diffuse || next == VertexClass::light;
}

bool caustic_perturbable(const Path& path) {
    const int m = path.last();
    if (m < 3 || path.vertices[1].cls != VertexClass::diffuse || path.vertices[m].cls != VertexClass::light)
        return false;
    for (int k = 2; k < m; ++k)
        if (path.vertices[k].cls != VertexClass::specular)
            return false;
    return true;
}

Rgb emission_direction_contribution(const Path& path, const Scene& scene) {
    const int m = path.last();
    Rgb c{camera_term(path, scene)};
    for (int k = 1; k < m; ++k) {
        c *= vertex_bsdf(path, k, scene);
        if (k > 1)
            c *= std::abs(dot(direction(path.vertices[k].position, path.vertices[k + 1].position),
                              path.vertices[k].normal));
    }
    const PathVertex& l = path.vertices[m];
    return c * std::abs(dot(direction(l.position, path.vertices[m - 1].position), l.normal)) * light_term(path, scene);
}

}  // namespace partmc
