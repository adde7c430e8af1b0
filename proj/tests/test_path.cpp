#include <doctest.h>

#include <cmath>
#include <set>

#include "partmc/path/prepass.h"
#include "partmc/scene/scene_io.h"
#include "fixtures.h"

using namespace partmc;
using fixtures::close_rel;

namespace {

// Camera looking straight down at a floor, with a small downward light off to the side.
Scene facing_patch_scene(bool with_occluder) {
    CameraDesc cam;
    cam.position = {0, 2, 0};
    cam.lookat = {0, 0, 0};
    cam.up = {0, 0, 1};
    cam.fov = 40.0;
    cam.width = cam.height = 16;
    std::vector<Material> mats{{"white", MaterialKind::diffuse, Rgb{0.5}, 1.5}, {"black", MaterialKind::diffuse, Rgb{0.0}, 1.5}};
    std::vector<Primitive> prims{
        {Shape::quad({-5, 0, -5}, {0, 0, 10}, {10, 0, 0}), 0, {}},
        {Shape::quad({0.9, 1, -0.1}, {0.2, 0, 0}, {0, 0, 0.2}), 1, Rgb{3.0}},
    };
    if (with_occluder)
        prims.push_back({Shape::quad({0.4, 0.5, -0.2}, {0.2, 0, 0}, {0, 0, 0.4}), 0, {}});
    return Scene("facing", Camera(cam), mats, prims);
}

Path facing_path() {
    Path p;
    p.film = {8.0, 8.0};
    p.vertices.push_back({{0, 2, 0}, {0, -1, 0}, -1, VertexClass::eye, false});
    p.vertices.push_back({{0, 0, 0}, {0, 1, 0}, 0, VertexClass::diffuse, false});
    p.vertices.push_back({{1, 1, 0}, {0, -1, 0}, 1, VertexClass::light, false});
    return p;
}


// Independent brute-force estimator: pure BSDF sampling, no next-event
// estimation, no Russian roulette. Returns the luminance of one sample.
double naive_sample(const Scene& scene, PixelCoord px, RandomStream& rng) {
    const Camera& cam = scene.camera();
    Ray ray = cam.generate_ray({px.x + rng.uniform(), px.y + rng.uniform()});
    Rgb throughput{1.0};
    for (int k = 1; k < kMaxVertices; ++k) {
        const auto hit = scene.intersect(ray);
        if (!hit)
            return 0.0;
        const Primitive& prim = scene.primitive(hit->prim);
        if (prim.is_emitter())
            return scalar_contribution(throughput * scene.emitted(hit->prim, hit->normal, -ray.direction));
        if (k == kMaxVertices - 1)
            return 0.0;
        const BsdfSample s = bsdf_sample(scene.material_of(hit->prim), -ray.direction, hit->normal, rng.uniform(),
                                         rng.uniform(), rng.uniform());
        if (s.pdf <= 0.0)
            return 0.0;
        throughput *= s.value * (std::abs(dot(s.wo, hit->normal)) / s.pdf);
        ray = Ray{hit->point, s.wo};
    }
    return 0.0;
}

struct MeanVar {
    double sum = 0, sum2 = 0;
    long n = 0;
    void add(double v) { sum += v; sum2 += v * v; ++n; }
    double mean() const { return sum / n; }
    double se() const { return std::sqrt(std::max(0.0, sum2 / n - mean() * mean()) / n); }
};

double trace_luminance(const Scene& scene, PixelCoord px, RandomStream stream) {
    double v = 0.0;
    for (const Path& p : trace_path(scene, px, stream))
        v += scalar_contribution(p.f / p.pdf);
    return v;
}

}  // namespace

TEST_CASE("contribution of a direct path matches the hand-computed product") {
    const Scene scene = facing_patch_scene(false);
    const Path p = facing_path();
    const double A = 4.0 * std::pow(std::tan(20.0 * kPi / 180.0), 2);
    // W_e G(x0,x1) = 1 / (A * 1^4) * (1 * 1 / 2^2); fr = 0.5 / pi; G(x1,x2) = (1/sqrt2)^2 / 2; Le = 3
    const double expected = 1.0 / (4.0 * A) * (0.5 / kPi) * 0.25 * 3.0;
    const Rgb f = path_contribution(p, scene);
    CHECK(f.r == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f.g == doctest::Approx(expected).epsilon(1e-12));

    // shortest split: s = 1
    const Rgb S = prefix_contribution(p, 1, scene);
    const Rgb alpha = suffix_contribution(p, 1, scene);
    CHECK(S.r == doctest::Approx(1.0 / (4.0 * A) * (0.5 / kPi)).epsilon(1e-12));
    CHECK(alpha.r == doctest::Approx(0.25 * 3.0).epsilon(1e-12));
    CHECK(close_rel(S * alpha, f, 1e-12));
    CHECK(p.signature().str() == "EDL");
}

TEST_CASE("an occluded segment annihilates the contribution") {
    const Scene scene = facing_patch_scene(true);
    const Path p = facing_path();
    CHECK(path_contribution(p, scene).is_black());
    CHECK(suffix_contribution(p, 1, scene).is_black());
    CHECK_FALSE(path_contribution_unoccluded(p, scene).is_black());
}

TEST_CASE("prefix times suffix equals the full contribution on traced paths") {
    const Scene scene = builtin_scene("cornell-caustic", {32, 32, 1.0});
    RandomStream pick(77, 0);
    int checked = 0;
    bool all_close = true, tracer_consistent = true;
    for (uint64_t i = 0; checked < 1000; ++i) {
        const PixelCoord px{static_cast<int>(i % 32), static_cast<int>((i / 32) % 32)};
        for (const Path& p : trace_path(scene, px, RandomStream(3, i))) {
            if (p.last() < 2)
                continue;
            const int s = 1 + static_cast<int>(pick.uniform_index(p.last() - 1));
            const Rgb f = path_contribution(p, scene);
            all_close &= close_rel(prefix_contribution(p, s, scene) * suffix_contribution(p, s, scene), f, 1e-10);
            tracer_consistent &= close_rel(p.f, f, 1e-9);
            ++checked;
        }
    }
    CHECK(all_close);
    CHECK(tracer_consistent);
}

TEST_CASE("image-plane contribution equals f over the chain Jacobian") {
    const Scene scene = builtin_scene("cornell-caustic", {32, 32, 1.0});
    int with_chain = 0;
    bool ok = true;
    for (uint64_t i = 0; i < 4000; ++i) {
        const PixelCoord px{static_cast<int>(i % 32), static_cast<int>((i / 32) % 32)};
        for (const Path& p : trace_path(scene, px, RandomStream(5, i))) {
            const Rgb direct = image_plane_contribution(p, scene);
            const Rgb via_f = path_contribution_unoccluded(p, scene) / image_plane_jacobian(p, scene);
            ok &= close_rel(direct, via_f, 1e-9);
            with_chain += p.first_nonspecular() > 1;
        }
    }
    CHECK(ok);
    CHECK(with_chain > 50);
}

TEST_CASE("lens perturbability follows the vertex after the first non-specular one") {
    auto path_of = [](const std::string& sig) {
        Path p;
        for (char c : sig)
            p.vertices.push_back({{}, {}, 0, static_cast<VertexClass>(c), false});
        return p;
    };
    CHECK(lens_perturbable(path_of("EDL")));
    CHECK(lens_perturbable(path_of("EDDL")));
    CHECK(lens_perturbable(path_of("ESSDL")));
    CHECK(lens_perturbable(path_of("EL")));
    CHECK(lens_perturbable(path_of("ESL")));
    CHECK_FALSE(lens_perturbable(path_of("EDSSL")));
    CHECK_FALSE(lens_perturbable(path_of("ESDSL")));
    CHECK(path_of("ESSDL").first_nonspecular() == 3);
    CHECK(path_of("ESL").first_nonspecular() == 2);
}

TEST_CASE("trace replay is deterministic") {
    const Scene scene = builtin_scene("cornell-caustic", {16, 16, 1.0});
    for (uint64_t i = 0; i < 200; ++i) {
        const PixelCoord px{static_cast<int>(i % 16), static_cast<int>(i / 16)};
        const auto a = trace_path(scene, px, RandomStream(1, i));
        const auto b = trace_path(scene, px, RandomStream(1, i));
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            REQUIRE(a[k].vertices.size() == b[k].vertices.size());
            for (std::size_t v = 0; v < a[k].vertices.size(); ++v)
                CHECK(a[k].vertices[v].position == b[k].vertices[v].position);
            CHECK(a[k].f == b[k].f);
            CHECK(a[k].pdf == b[k].pdf);
            const auto r = replay_path(scene, px, a[k].seed, a[k].emission_index);
            REQUIRE(r);
            CHECK(r->signature() == a[k].signature());
        }
    }
}

TEST_CASE("pre-pass records replay to identical signatures and contributions") {
    const Scene scene = builtin_scene("cornell-caustic", {16, 16, 1.0});
    const PrepassResult pre = run_prepass(scene, 4, 9);
    std::size_t total = 0;
    bool ok = true;
    for (const auto& [sig, buf] : pre.census) {
        for (const PathRecord& r : buf.records) {
            const auto p = replay_record(scene, r);
            ok &= p.has_value() && p->signature() == sig;
            if (p) {
                const double s = scalar_contribution(p->f / p->pdf);
                ok &= std::abs(s - r.scalar) <= 1e-12 * r.scalar;
            }
            ++total;
        }
    }
    CHECK(ok);
    CHECK(total > 500);
}

TEST_CASE("signature buffers partition the completed paths") {
    const Scene scene = builtin_scene("cornell-caustic", {16, 16, 1.0});
    const PrepassResult pre = run_prepass(scene, 2, 4);
    // re-trace everything independently and count paths per signature
    std::map<Signature, std::size_t> counts;
    std::size_t total = 0;
    for (int pass = 0; pass < 2; ++pass)
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                for (const Path& p : trace_path(scene, {x, y}, RandomStream(prepass_stream(4, pass, {x, y}, 16, 16))))
                    if (!p.f.is_black()) {
                        ++counts[p.signature()];
                        ++total;
                    }
    std::size_t filed = 0;
    for (const auto& [sig, buf] : pre.census) {
        CHECK(buf.signature == sig);
        CHECK(buf.records.size() == counts[sig]);
        filed += buf.records.size();
    }
    CHECK(filed == total);
}

TEST_CASE("parallel pre-pass is bit-identical to the serial reference") {
    const Scene scene = builtin_scene("cornell-caustic", {24, 20, 1.0});
    const PrepassResult a = run_prepass(scene, 3, 21);
    const PrepassResult b = serial::run_prepass(scene, 3, 21);
    REQUIRE(a.census.size() == b.census.size());
    for (auto ia = a.census.begin(), ib = b.census.begin(); ia != a.census.end(); ++ia, ++ib) {
        REQUIRE(ia->first == ib->first);
        REQUIRE(ia->second.records.size() == ib->second.records.size());
        CHECK(ia->second.gamma == ib->second.gamma);
        for (std::size_t k = 0; k < ia->second.records.size(); ++k) {
            const PathRecord& ra = ia->second.records[k];
            const PathRecord& rb = ib->second.records[k];
            CHECK((ra.c == rb.c && ra.pixel == rb.pixel && ra.seed == rb.seed && ra.emission == rb.emission));
        }
    }
    for (std::size_t i = 0; i < a.gbuffer.size(); ++i)
        CHECK((a.gbuffer[i].position == b.gbuffer[i].position && a.gbuffer[i].g == b.gbuffer[i].g));
}

TEST_CASE("pre-pass census contents") {
    SUBCASE("no emission gives an empty census") {
        const Scene dark = builtin_scene("cornell-basic", {16, 16, 0.0});
        CHECK(run_prepass(dark, 4, 1).census.empty());
    }
    SUBCASE("cornell-basic has direct and one-bounce signatures") {
        for (uint64_t seed : {1, 2}) {
            const PrepassResult pre = run_prepass(builtin_scene("cornell-basic", {32, 32, 1.0}), 8, seed);
            CHECK(pre.census.count(Signature("EDL")) == 1);
            CHECK(pre.census.count(Signature("EDDL")) == 1);
        }
    }
    SUBCASE("cornell-caustic has specular and doubly specular signatures") {
        const PrepassResult pre = run_prepass(builtin_scene("cornell-caustic", {32, 32, 1.0}), 8, 1);
        bool any_s = false, double_s = false;
        for (const auto& [sig, buf] : pre.census) {
            any_s |= sig.has_specular();
            double_s |= sig.str().find("SS") != std::string::npos;
        }
        CHECK(any_s);
        CHECK(double_s);
        CHECK(pre.census.count(Signature("ESSDL")) == 1);
        CHECK(pre.census.at(Signature("ESSDL")).gamma > 0.0);
    }
    SUBCASE("pre-pass needs two paths per pixel") {
        CHECK_THROWS(run_prepass(builtin_scene("cornell-basic", {8, 8, 1.0}), 1, 1));
    }
}

TEST_CASE("GBuffer holds the first non-specular vertex of every pixel") {
    const Scene scene = builtin_scene("cornell-caustic", {32, 32, 1.0});
    const PrepassResult pre = run_prepass(scene, 2, 3);
    int valid = 0, through_glass = 0;
    for (std::size_t i = 0; i < pre.gbuffer.size(); ++i) {
        const FirstHit& t = pre.gbuffer[i];
        if (!t.valid)
            continue;
        ++valid;
        for (int c = 0; c < 3; ++c)
            CHECK((t.albedo[c] >= 0.0 && t.albedo[c] <= 1.0));
        CHECK(std::abs(length(t.normal) - 1.0) < 1e-9);
        through_glass += t.depth > 1;
    }
    CHECK(valid > 900);
    CHECK(through_glass > 10);
}

TEST_CASE("first-half gamma") {
    PartitionBuffer buf;
    for (double s : {1.0, 2.0, 3.0, 4.0})
        buf.records.push_back({Rgb{s}, s, {}, {}, 0});
    CHECK(first_half_gamma(buf) == 3.0);
    buf.records.resize(1);
    CHECK(first_half_gamma(buf) == 0.0);
}

TEST_CASE("white furnace: path tracing with NEE and MIS recovers the analytic radiance") {
    const Scene scene = builtin_scene("furnace");
    const int spp = 4096;
    ImageBuffer img(16, 16);
    MeanVar all;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            MeanVar pix;
            for (int s = 0; s < spp; ++s) {
                const double v = trace_luminance(scene, {x, y}, RandomStream(prepass_stream(1, s, {x, y}, 16, 16)));
                pix.add(v);
                all.add(v);
            }
            CHECK(pix.mean() == doctest::Approx(1.0).epsilon(0.05));
        }
    CHECK(all.mean() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("direct lighting estimate matches stratified quadrature") {
    const Scene scene = builtin_scene("lit-plane");
    const Camera& cam = scene.camera();
    const int light = scene.lights().front();
    const Shape& lq = scene.primitive(light).shape;
    const Rgb le = scene.primitive(light).emission;
    const double rho = 0.7;
    for (PixelCoord px : {PixelCoord{8, 8}, PixelCoord{3, 12}}) {
        // quadrature: 16x16 subpixel midpoints x 128x128 light midpoints
        double quad = 0.0;
        const int ns = 16, nl = 128;
        for (int sy = 0; sy < ns; ++sy)
            for (int sx = 0; sx < ns; ++sx) {
                const Ray ray = cam.generate_ray({px.x + (sx + 0.5) / ns, px.y + (sy + 0.5) / ns});
                const auto hit = scene.intersect(ray);
                REQUIRE(hit);
                double radiance = 0.0;
                for (int j = 0; j < nl; ++j)
                    for (int i = 0; i < nl; ++i) {
                        const Vec3 y = lq.a + lq.b * ((i + 0.5) / nl) + lq.c * ((j + 0.5) / nl);
                        const Vec3 d = y - hit->point;
                        const double d2 = dot(d, d);
                        const double cx = d.y / std::sqrt(d2);  // floor normal is +y
                        const double cy = -dot(lq.normal, d) / std::sqrt(d2);
                        if (cx > 0 && cy > 0)
                            radiance += rho / kPi * cx * cy / d2;
                    }
                quad += radiance * lq.area() / (nl * nl);
            }
        quad = quad / (ns * ns) * scalar_contribution(le);

        MeanVar est;
        for (uint64_t i = 0; i < 1'000'000; ++i)
            est.add(trace_luminance(scene, px, RandomStream(99, i)));
        CAPTURE(quad);
        CAPTURE(est.mean());
        CHECK(std::abs(est.mean() - quad) < 3.0 * est.se());
    }
}

TEST_CASE("MIS path tracer agrees with a brute-force BSDF-only estimator") {
    const Scene scene = builtin_scene("cornell-basic", {32, 32, 1.0});
    for (PixelCoord px : {PixelCoord{16, 8}, PixelCoord{6, 20}}) {
        MeanVar mis, naive;
        RandomStream rng(1234, px.x * 100 + px.y);
        for (uint64_t i = 0; i < 100'000; ++i) {
            mis.add(trace_luminance(scene, px, RandomStream(55, i)));
            naive.add(naive_sample(scene, px, rng));
        }
        const double sigma = std::sqrt(mis.se() * mis.se() + naive.se() * naive.se());
        CAPTURE(mis.mean());
        CAPTURE(naive.mean());
        CHECK(std::abs(mis.mean() - naive.mean()) < 3.0 * sigma);
    }
}

TEST_CASE("large-step proposal density is consistent with its sampler") {
    // E_q[f*/q] over large-step samples estimates the same integral as the pre-pass.
    const Scene scene = builtin_scene("cornell-caustic", {32, 32, 1.0});
    RandomStream rng(8, 1);
    MeanVar ls;
    int mixture_checked = 0;
    bool density_matches = true;
    for (int i = 0; i < 300'000; ++i) {
        const auto p = sample_large_step(scene, rng);
        if (!p || p->f.is_black()) {
            ls.add(0.0);
            continue;
        }
        ls.add(scalar_contribution(p->f) / p->pdf);
        if (mixture_checked < 2000) {
            density_matches &= std::abs(p->pdf - 0.5 * (bsdf_walk_density(*p, scene) + nee_walk_density(*p, scene))) <=
                               1e-12 * p->pdf;
            ++mixture_checked;
        }
    }
    CHECK(density_matches);

    MeanVar pt;
    for (int pass = 0; pass < 64; ++pass)
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                pt.add(trace_luminance(scene, {x, y}, RandomStream(prepass_stream(2, pass, {x, y}, 32, 32))));
    const double sigma = std::sqrt(ls.se() * ls.se() + pt.se() * pt.se());
    CAPTURE(ls.mean());
    CAPTURE(pt.mean());
    CHECK(std::abs(ls.mean() - pt.mean()) < 3.0 * sigma);
}

TEST_CASE("census CSV") {
    Census census;
    PartitionBuffer& b = census[Signature("EDL")];
    b.signature = Signature("EDL");
    b.records.resize(3);
    b.gamma = 0.5;
    std::ostringstream out;
    write_census_csv(census, out);
    CHECK(out.str() == "signature,paths,gamma\nEDL,3,0.5\n");
}
