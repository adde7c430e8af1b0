#include "partmc/scene/scene.h"

#include <algorithm>
#include <stdexcept>

namespace partmc {

Scene::Scene(std::string name, Camera camera, std::vector<Material> materials, std::vector<Primitive> primitives)
    : name_(std::move(name)), camera_(std::move(camera)), materials_(std::move(materials)),
      primitives_(std::move(primitives)) {
    shapes_.reserve(primitives_.size());
    Bounds3 bounds;
    for (const Primitive& p : primitives_) {
        if (p.material < 0 || p.material >= static_cast<int>(materials_.size()))
            throw std::invalid_argument("primitive references a missing material");
        shapes_.push_back(p.shape);
        bounds.extend(p.shape.bounds());
    }
    if (!primitives_.empty())
        extent_ = length(bounds.hi - bounds.lo);
    bvh_ = Bvh(shapes_);

    light_select_.assign(primitives_.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < primitives_.size(); ++i) {
        const Primitive& p = primitives_[i];
        if (!p.is_emitter())
            continue;
        const double power = p.shape.area() * scalar_contribution(p.emission);
        if (power <= 0.0)
            continue;
        lights_.push_back(static_cast<int>(i));
        total += power;
        light_cdf_.push_back(total);
        light_select_[i] = power;
    }
    for (double& c : light_cdf_)
        c /= total;
    for (double& s : light_select_)
        s /= total;
    if (!light_cdf_.empty())
        light_cdf_.back() = 1.0;
}

std::optional<SurfaceHit> Scene::intersect(const Ray& ray) const {
    const auto h = bvh_.intersect(shapes_, ray, kRayEpsilon, 1e300);
    if (!h)
        return std::nullopt;
    return SurfaceHit{h->t, ray.at(h->t), h->normal, h->index};
}

std::optional<SurfaceHit> Scene::intersect_linear(const Ray& ray) const {
    const auto h = partmc::intersect_linear(shapes_, ray, kRayEpsilon, 1e300);
    if (!h)
        return std::nullopt;
    return SurfaceHit{h->t, ray.at(h->t), h->normal, h->index};
}

bool Scene::visible(const Vec3& a, const Vec3& b) const {
    const Vec3 d = b - a;
    const double dist = length(d);
    if (dist <= 2.0 * kRayEpsilon)
        return true;
    return !bvh_.any_hit(shapes_, Ray{a, d / dist}, kRayEpsilon, dist - kRayEpsilon);
}

LightSample Scene::sample_light(double u_select, double u1, double u2) const {
    LightSample ls;
    if (lights_.empty())
        return ls;
    const auto it = std::upper_bound(light_cdf_.begin(), light_cdf_.end(), u_select);
    const std::size_t k = std::min<std::size_t>(it - light_cdf_.begin(), lights_.size() - 1);
    ls.prim = lights_[k];
    primitives_[ls.prim].shape.sample_uniform(u1, u2, ls.point, ls.normal);
    ls.pdf_area = light_pdf(ls.prim);
    return ls;
}

double Scene::light_pdf(int prim) const {
    if (prim < 0 || light_select_[prim] == 0.0)
        return 0.0;
    return light_select_[prim] / primitives_[prim].shape.area();
}

Rgb Scene::emitted(int prim, const Vec3& n, const Vec3& w) const {
    const Primitive& p = primitives_[prim];
    if (!p.is_emitter() || dot(n, w) <= 0.0)
        return {};
    return p.emission;
}

double geometry_term_unoccluded(const Vec3& pa, const Vec3& na, const Vec3& pb, const Vec3& nb) {
    const Vec3 d = pb - pa;
    const double dist2 = length_squared(d);
    const Vec3 w = d / std::sqrt(dist2);
    return std::abs(dot(na, w)) * std::abs(dot(nb, w)) / dist2;
}

double geometry_term(const Scene& scene, const Vec3& pa, const Vec3& na, const Vec3& pb, const Vec3& nb) {
    if (!scene.visible(pa, pb))
        return 0.0;
    return geometry_term_unoccluded(pa, na, pb, nb);
}

}  // namespace partmc
