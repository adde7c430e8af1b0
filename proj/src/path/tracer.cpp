#include "partmc/path/tracer.h"

#include <algorithm>

namespace partmc {

namespace {

PathVertex make_vertex(const Scene& scene, const SurfaceHit& hit) {
    PathVertex v;
    v.position = hit.point;
    v.normal = hit.normal;
    v.prim = hit.prim;
    v.cls = scene.primitive(hit.prim).is_emitter() ? VertexClass::light : scene.material_of(hit.prim).vertex_class();
    return v;
}

PathVertex camera_vertex(const Camera& cam) { return {cam.position(), cam.forward(), -1, VertexClass::eye, false}; }

// Area density of reaching x_{k+1} from x_k by BSDF sampling.
double step_density(const Path& p, int k, const Scene& scene) {
    const PathVertex& v = p.vertices[k];
    const PathVertex& next = p.vertices[k + 1];
    const Vec3 wi = normalize(p.vertices[k - 1].position - v.position);
    const Vec3 d = next.position - v.position;
    const double dist2 = length_squared(d);
    const Vec3 wo = d / std::sqrt(dist2);
    return bsdf_pdf(scene.material_of(v.prim), wi, wo, v.normal) * std::abs(dot(next.normal, wo)) / dist2;
}

double film_density(const Path& p, const Scene& scene) {
    return scene.camera().film_jacobian(p.vertices[1].position, p.vertices[1].normal) / scene.camera().film_area();
}

double stop_probability(int k) { return k == kMaxVertices - 2 ? 1.0 : kNeeStopProbability; }

std::optional<Path> large_step_walk(const Scene& scene, RandomStream& stream, bool nee_mode) {
    const Camera& cam = scene.camera();
    Path p;
    p.seed = stream.id();
    p.emission_index = -1;
    const double fx = stream.uniform(), fy = stream.uniform();
    p.film = {fx * cam.width(), fy * cam.height()};
    Ray ray = cam.generate_ray(p.film);
    p.vertices.push_back(camera_vertex(cam));

    for (int k = 1;; ++k) {
        const auto hit = scene.intersect(ray);
        if (!hit)
            return std::nullopt;
        p.vertices.push_back(make_vertex(scene, *hit));
        PathVertex& v = p.vertices.back();
        if (v.cls == VertexClass::light) {
            if (nee_mode || scene.emitted(v.prim, v.normal, -ray.direction).is_black())
                return std::nullopt;
            break;
        }
        if (k == kMaxVertices - 1)
            return std::nullopt;
        const Material& mat = scene.material_of(v.prim);
        const Vec3 wi = -ray.direction;
        if (nee_mode && !mat.is_specular()) {
            if (stream.uniform() < stop_probability(k)) {
                const double u0 = stream.uniform(), u1 = stream.uniform(), u2 = stream.uniform();
                const LightSample ls = scene.sample_light(u0, u1, u2);
                if (ls.prim < 0 || !scene.visible(v.position, ls.point))
                    return std::nullopt;
                p.vertices.push_back({ls.point, ls.normal, ls.prim, VertexClass::light, false});
                break;
            }
        }
        if (nee_mode && k == kMaxVertices - 2)
            return std::nullopt;  // the only continuation would end on an emitter hit
        const double ue = stream.uniform(), u1 = stream.uniform(), u2 = stream.uniform();
        const BsdfSample bs = bsdf_sample(mat, wi, v.normal, ue, u1, u2);
        if (bs.pdf <= 0.0 || bs.value.is_black())
            return std::nullopt;
        v.transmitted = bs.transmitted;
        ray = Ray{v.position, bs.wo};
    }
    p.f = path_contribution_unoccluded(p, scene);
    p.pdf = large_step_density(p, scene);
    return p;
}

}  // namespace

std::vector<Path> trace_path(const Scene& scene, PixelCoord pixel, RandomStream stream, FirstHit* first_hit) {
    std::vector<Path> out;
    const Camera& cam = scene.camera();
    if (first_hit)
        *first_hit = FirstHit{};
    bool chain_open = first_hit != nullptr;  // still following the camera's specular chain

    Path path;
    path.seed = stream.id();
    const double ux = stream.uniform(), uy = stream.uniform();
    path.film = {pixel.x + ux, pixel.y + uy};
    Ray ray = cam.generate_ray(path.film);
    path.vertices.push_back(camera_vertex(cam));

    auto hit = scene.intersect(ray);
    if (!hit)
        return out;
    path.vertices.push_back(make_vertex(scene, *hit));

    // F: contribution of x0..x_k up to (excluding) the factor at x_k.
    // P: BSDF-walk density of x1..x_k including Russian roulette survivals.
    // beta: F/P without the roulette factors; drives the survival probability.
    double P = film_density(path, scene);
    Rgb F{P};
    Rgb beta{1.0};
    double P_prev = 0.0;
    bool prev_diffuse = false;
    Rgb chain_g{1.0 / cam.film_area()};
    double chain_dist = hit->t;

    auto emit = [&](Path&& p, const Rgb& f, double pdf) {
        p.f = f;
        p.pdf = pdf;
        p.emission_index = static_cast<int>(out.size());
        out.push_back(std::move(p));
    };

    for (int k = 1;; ++k) {
        PathVertex& v = path.vertices[k];
        const Vec3 wi = -ray.direction;

        if (v.cls == VertexClass::light) {
            if (chain_open) {
                *first_hit = {v.position, dot(v.normal, wi) > 0.0 ? v.normal : -v.normal, Rgb{}, chain_g, k,
                              chain_dist, true, true};
                chain_open = false;
            }
            const Rgb le = scene.emitted(v.prim, v.normal, wi);
            if (!le.is_black()) {
                const double p_nee = prev_diffuse ? P_prev * scene.light_pdf(v.prim) : 0.0;
                emit(Path(path), F * le, P + p_nee);
            }
            break;
        }

        const Material& mat = scene.material_of(v.prim);
        const bool diffuse = !mat.is_specular();
        if (chain_open && diffuse) {
            *first_hit = {v.position, dot(v.normal, wi) > 0.0 ? v.normal : -v.normal, mat.albedo, chain_g, k,
                          chain_dist, true, false};
            chain_open = false;
        }
        if (k == kMaxVertices - 1)
            break;

        const bool roulette = k >= kRussianRouletteStart;
        const double survive = roulette ? std::min(1.0, beta.max_channel()) : 1.0;

        if (diffuse) {
            const double u0 = stream.uniform(), u1 = stream.uniform(), u2 = stream.uniform();
            const LightSample ls = scene.sample_light(u0, u1, u2);
            if (ls.prim >= 0) {
                const Vec3 d = ls.point - v.position;
                const double dist2 = length_squared(d);
                const Vec3 wo = d / std::sqrt(dist2);
                const double cos_l = std::abs(dot(ls.normal, wo));
                const Rgb le = scene.emitted(ls.prim, ls.normal, -wo);
                const Rgb fr = bsdf_eval(mat, wi, wo, v.normal);
                if (!le.is_black() && !fr.is_black() && cos_l > 0.0 && scene.visible(v.position, ls.point)) {
                    const double g = std::abs(dot(v.normal, wo)) * cos_l / dist2;
                    const double p_nee = P * ls.pdf_area;
                    const double p_bsdf = P * survive * bsdf_pdf(mat, wi, wo, v.normal) * cos_l / dist2;
                    Path p(path);
                    p.vertices.push_back({ls.point, ls.normal, ls.prim, VertexClass::light, false});
                    emit(std::move(p), F * fr * g * le, p_nee + p_bsdf);
                }
            }
        }

        if (roulette && stream.uniform() >= survive)
            break;
        const double ue = stream.uniform(), u1 = stream.uniform(), u2 = stream.uniform();
        const BsdfSample bs = bsdf_sample(mat, wi, v.normal, ue, u1, u2);
        if (bs.pdf <= 0.0 || bs.value.is_black())
            break;
        v.transmitted = bs.transmitted;
        ray = Ray{v.position, bs.wo};
        hit = scene.intersect(ray);
        if (!hit) {
            chain_open = false;
            break;
        }
        const double cos_out = std::abs(dot(bs.wo, v.normal));
        const double cos_in = std::abs(dot(bs.wo, hit->normal));
        const double dist2 = hit->t * hit->t;
        if (chain_open) {
            chain_g *= bs.value * cos_out;  // specular throughput of this chain vertex
            chain_dist += hit->t;
        }
        P_prev = P;
        prev_diffuse = diffuse;
        F *= bs.value * (cos_out * cos_in / dist2);
        P *= survive * bs.pdf * cos_in / dist2;
        beta *= bs.value * (cos_out / bs.pdf);
        path.vertices.push_back(make_vertex(scene, *hit));
    }
    return out;
}

std::optional<Path> replay_path(const Scene& scene, PixelCoord pixel, StreamId seed, int emission_index) {
    std::vector<Path> paths = trace_path(scene, pixel, RandomStream(seed));
    if (emission_index < 0 || emission_index >= static_cast<int>(paths.size()))
        return std::nullopt;
    return std::move(paths[emission_index]);
}

std::optional<Path> sample_large_step(const Scene& scene, RandomStream& stream) {
    const bool nee_mode = stream.uniform() >= 0.5;
    return large_step_walk(scene, stream, nee_mode);
}

double bsdf_walk_density(const Path& p, const Scene& scene) {
    const int m = p.last();
    if (m < 1 || m > kMaxVertices - 1 || p.vertices[m].cls != VertexClass::light)
        return 0.0;
    double d = film_density(p, scene);
    for (int k = 1; k < m; ++k)
        d *= step_density(p, k, scene);
    return d;
}

double nee_walk_density(const Path& p, const Scene& scene) {
    const int m = p.last();
    if (m < 2 || m > kMaxVertices - 1 || p.vertices[m].cls != VertexClass::light ||
        p.vertices[m - 1].cls != VertexClass::diffuse)
        return 0.0;
    double d = film_density(p, scene);
    for (int k = 1; k < m - 1; ++k) {
        const bool diffuse = p.vertices[k].cls == VertexClass::diffuse;
        if (!diffuse && k == kMaxVertices - 2)
            return 0.0;
        d *= step_density(p, k, scene) * (diffuse ? 1.0 - stop_probability(k) : 1.0);
    }
    return d * stop_probability(m - 1) * scene.light_pdf(p.vertices[m].prim);
}

double large_step_density(const Path& p, const Scene& scene) {
    return 0.5 * bsdf_walk_density(p, scene) + 0.5 * nee_walk_density(p, scene);
}

}  // namespace partmc
