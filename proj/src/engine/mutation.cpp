#include "partmc/engine/mutation.h"

#include <cmath>

namespace partmc {

namespace {

VertexClass class_of(const Scene& scene, int prim) {
    return scene.primitive(prim).is_emitter() ? VertexClass::light : scene.material_of(prim).vertex_class();
}

MutationOutcome reject() { return {}; }

}  // namespace

std::optional<Path> retrace_prefix(const Path& path, Vec2 film, const Scene& scene) {
    const Camera& cam = scene.camera();
    if (!cam.on_film(film))
        return std::nullopt;
    const int s = path.first_nonspecular();
    const int m = path.last();

    Path out;
    out.film = film;
    out.seed = path.seed;
    out.emission_index = path.emission_index;
    out.vertices.push_back({cam.position(), cam.forward(), -1, VertexClass::eye, false});
    Ray ray = cam.generate_ray(film);
    for (int k = 1; k <= s; ++k) {
        const auto hit = scene.intersect(ray);
        if (!hit)
            return std::nullopt;
        const PathVertex& old = path.vertices[k];
        PathVertex v{hit->point, hit->normal, hit->prim, class_of(scene, hit->prim), false};
        if (v.cls != old.cls)
            return std::nullopt;
        if (k < s) {
            // follow the recorded reflect/refract decision
            const BsdfSample bs = bsdf_sample(scene.material_of(hit->prim), -ray.direction, hit->normal,
                                              old.transmitted ? std::nextafter(1.0, 0.0) : 0.0, 0.5, 0.5);
            if (!(bs.pdf > 0.0) || bs.transmitted != old.transmitted)
                return std::nullopt;
            v.transmitted = bs.transmitted;
            ray = Ray{hit->point, bs.wo};
        }
        out.vertices.push_back(v);
    }
    for (int k = s + 1; k <= m; ++k)
        out.vertices.push_back(path.vertices[k]);

    if (s < m && !scene.visible(out.vertices[s].position, out.vertices[s + 1].position))
        out.f = Rgb{};
    else
        out.f = path_contribution_unoccluded(out, scene);
    return out;
}

ReconnectionVertex reconnection_vertex(const Path& path) {
    const int s = path.first_nonspecular();
    const int m = path.last();
    ReconnectionVertex r;
    if (s == m) {
        r.terminal = true;
        r.position = path.vertices[m].position;
        r.normal = path.vertices[m].normal;
        return r;
    }
    const PathVertex& x = path.vertices[s + 1];
    r.position = x.position;
    // a diffuse x_{s+1} reflects, so the prefix arrives from the side of x_{s+2};
    // an emitter only emits from the side the prefix is on
    const Vec3 side = s + 1 < m ? path.vertices[s + 2].position : path.vertices[s].position;
    r.normal = dot(x.normal, side - x.position) >= 0.0 ? x.normal : -x.normal;
    return r;
}

double image_plane_target(const Path& path, const Scene& scene) {
    if (path.f.is_black() || !lens_perturbable(path))
        return 0.0;
    return scalar_contribution(image_plane_contribution(path, scene));
}

double caustic_target(const Path& path, const Scene& scene) {
    if (path.f.is_black() || !caustic_perturbable(path))
        return 0.0;
    return scalar_contribution(emission_direction_contribution(path, scene));
}

std::optional<Path> retrace_from_light(const Path& path, const Vec3& direction, const Scene& scene) {
    const Camera& cam = scene.camera();
    const int m = path.last();
    const PathVertex& light = path.vertices[m];
    if (dot(direction, light.normal) * dot(path.vertices[m - 1].position - light.position, light.normal) <= 0.0)
        return std::nullopt;  // stays on the emitting side

    VertexList rev;  // x_{m-1} down to x_1
    Ray ray{light.position, direction};
    for (int k = m - 1; k >= 1; --k) {
        const auto hit = scene.intersect(ray);
        if (!hit)
            return std::nullopt;
        const PathVertex& old = path.vertices[k];
        PathVertex v{hit->point, hit->normal, hit->prim, class_of(scene, hit->prim), false};
        if (v.cls != old.cls)
            return std::nullopt;
        if (k > 1) {
            // reflection and refraction are reversible, so the recorded choice replays backward
            const BsdfSample bs = bsdf_sample(scene.material_of(hit->prim), -ray.direction, hit->normal,
                                              old.transmitted ? std::nextafter(1.0, 0.0) : 0.0, 0.5, 0.5);
            if (!(bs.pdf > 0.0) || bs.transmitted != old.transmitted)
                return std::nullopt;
            v.transmitted = bs.transmitted;
            ray = Ray{hit->point, bs.wo};
        }
        rev.push_back(v);
    }
    const Vec3& x1 = rev.back().position;
    const auto film = cam.project(x1);
    if (!film || !scene.visible(cam.position(), x1))
        return std::nullopt;

    Path out;
    out.film = *film;
    out.seed = path.seed;
    out.emission_index = path.emission_index;
    out.vertices.push_back({cam.position(), cam.forward(), -1, VertexClass::eye, false});
    for (auto it = rev.rbegin(); it != rev.rend(); ++it)
        out.vertices.push_back(*it);
    out.vertices.push_back(light);
    out.f = path_contribution_unoccluded(out, scene);
    return out;
}

Vec2 lens_offset(const LensParams& params, double u1, double u2) {
    const double r = params.r_min * std::pow(params.r_max / params.r_min, u1);
    const double phi = 2.0 * kPi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

MutationOutcome caustic_perturbation(const ChainState& state, const ChainContext& ctx, RandomStream& stream) {
    const Path& x = state.current;
    const int m = x.last();
    const double u1 = stream.uniform(), u2 = stream.uniform();
    const double theta = ctx.caustic.theta_min * std::pow(ctx.caustic.theta_max / ctx.caustic.theta_min, u1);
    const double phi = 2.0 * kPi * u2;
    const Vec3 w = normalize(x.vertices[m - 1].position - x.vertices[m].position);
    const Vec3 w_new = Frame(w).to_world({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                          std::cos(theta)});
    MutationOutcome out;
    out.proposed = retrace_from_light(x, normalize(w_new), *ctx.scene);
    if (!out.proposed)
        return out;
    out.acceptance = std::min(1.0, caustic_target(*out.proposed, *ctx.scene) / state.pi);
    return out;
}

MutationOutcome lens_perturbation_isotropic(const ChainState& state, const ChainContext& ctx, RandomStream& stream) {
    const double u1 = stream.uniform(), u2 = stream.uniform();
    const Vec2 d = lens_offset(ctx.lens, u1, u2);
    MutationOutcome out;
    out.proposed = retrace_prefix(state.current, {state.current.film.x + d.x, state.current.film.y + d.y}, *ctx.scene);
    if (!out.proposed)
        return out;
    const double pi_new = image_plane_target(*out.proposed, *ctx.scene);
    out.acceptance = std::min(1.0, pi_new / state.pi);
    return out;
}

MutationOutcome guided_lens_perturbation(const ChainState& state, const ChainContext& ctx, RandomStream& stream) {
    const Path& x = state.current;
    const ReconnectionVertex rv = reconnection_vertex(x);
    const PixelCoord old_px = x.pixel();
    const CandidateSet fwd = candidate_weights(old_px, *ctx.offsets, *ctx.guidance, *ctx.gbuffer, rv);
    const double u = stream.uniform(), jx = stream.uniform(), jy = stream.uniform();
    if (fwd.empty())
        return reject();
    const CandidateDraw draw = sample_candidate(fwd, u);
    // a uniform position inside the chosen pixel; its density is the same in
    // both directions, so only the discrete pixel choice enters the ratio
    const Vec2 film{draw.pixel.x + jx, draw.pixel.y + jy};

    MutationOutcome out;
    out.proposed = retrace_prefix(x, film, *ctx.scene);
    if (!out.proposed)
        return out;
    const double pi_new = image_plane_target(*out.proposed, *ctx.scene);
    if (!(pi_new > 0.0))
        return out;
    const CandidateSet rev = candidate_weights(draw.pixel, *ctx.offsets, *ctx.guidance, *ctx.gbuffer, rv);
    out.acceptance =
        guided_acceptance(state.pi, pi_new, rev.weight_of(old_px), fwd.weight_of(draw.pixel), fwd.total, rev.total);
    return out;
}

double large_step_choice(const Path& path, const ChainContext& ctx) {
    return lens_perturbable(path) || caustic_perturbable(path) ? ctx.large_step_probability : 1.0;
}

MutationOutcome large_step(ChainState& state, const ChainContext& ctx, RandomStream& stream) {
    MutationOutcome out;
    // Redrawing until a contributing in-domain path appears keeps the proposal
    // proportional to the sampler's density on the domain; the normalizing
    // constant is the same in both directions and cancels.
    for (int attempt = 0; attempt < ctx.large_step_attempts; ++attempt) {
        out.proposed = sample_large_step(*ctx.scene, stream);
        if (out.proposed && !out.proposed->f.is_black() && out.proposed->pdf > 0.0 &&
            ctx.in_domain(out.proposed->signature()))
            break;
        out.proposed.reset();
    }
    if (!out.proposed)
        return out;
    if (state.q < 0.0)
        state.q = large_step_density(state.current, *ctx.scene);
    const double f_new = scalar_contribution(out.proposed->f);
    const double ratio = (f_new * state.q) / (state.fstar * out.proposed->pdf) *
                         large_step_choice(*out.proposed, ctx) / large_step_choice(state.current, ctx);
    out.acceptance = std::isfinite(ratio) ? std::min(1.0, ratio) : 1.0;
    return out;
}

void mutate(ChainState& state, const ChainContext& ctx) {
    RandomStream& rng = state.stream;
    const bool big = rng.uniform() < large_step_choice(state.current, ctx);
    const bool guided = ctx.guidance && ctx.gbuffer && ctx.offsets;
    const MutationType type = big                                      ? MutationType::large_step
                              : caustic_perturbable(state.current) ? MutationType::caustic
                              : guided                             ? MutationType::guided
                                                                   : MutationType::lens;

    MutationOutcome out;
    switch (type) {
    case MutationType::large_step: out = large_step(state, ctx, rng); break;
    case MutationType::guided: out = guided_lens_perturbation(state, ctx, rng); break;
    case MutationType::lens: out = lens_perturbation_isotropic(state, ctx, rng); break;
    case MutationType::caustic: out = caustic_perturbation(state, ctx, rng); break;
    }
    const double u = rng.uniform();
    out.accepted = out.proposed && out.acceptance > 0.0 && u < out.acceptance;
    state.stats.record(type, out.accepted);
    if (out.accepted) {
        const double q = type == MutationType::large_step ? out.proposed->pdf : -1.0;
        assign_path(state, std::move(*out.proposed), *ctx.scene);
        state.q = q;
    }
}

}  // namespace partmc
