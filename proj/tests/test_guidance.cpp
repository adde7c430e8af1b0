#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "partmc/core/random.h"
#include "partmc/guidance/guidance.h"
#include "fixtures.h"

using namespace partmc;
using namespace partmc::fixtures;

TEST_CASE("denoiser preserves a constant image") {
    const GBuffer gb = flat_gbuffer(24, 20);
    ImageBuffer img(24, 20);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        img[i] = Rgb{0.3, 0.6, 0.9};
    const ImageBuffer out = atrous_denoise(img, gb);
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        CHECK(out[i].r == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(out[i].g == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(out[i].b == doctest::Approx(0.9).epsilon(1e-12));
    }
}

TEST_CASE("denoiser spreads a single pixel within its footprint and keeps its mass") {
    const int n = 160;
    const GBuffer gb = flat_gbuffer(n, n);
    ImageBuffer img(n, n);
    img.at(80, 80) = Rgb{100.0};
    const ImageBuffer out = atrous_denoise(img, gb);
    const int reach = atrous_footprint(5);
    CHECK(reach == 62);
    double mass = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double v = scalar_contribution(out.at(x, y));
            mass += v;
            if (std::max(std::abs(x - 80), std::abs(y - 80)) > reach)
                CHECK(v == 0.0);
        }
    CHECK(std::abs(mass - 100.0) < 5.0);
    CHECK(scalar_contribution(out.at(80, 80)) < 100.0);
    CHECK(scalar_contribution(out.at(81, 80)) > 0.0);
}

TEST_CASE("denoiser keeps a zero image at zero") {
    const GBuffer gb = flat_gbuffer(16, 16);
    const ImageBuffer out = atrous_denoise(ImageBuffer(16, 16), gb);
    for (std::size_t i = 0; i < out.pixel_count(); ++i)
        CHECK(out[i].is_black());
    CHECK_THROWS_AS(atrous_denoise(ImageBuffer(8, 8), gb), std::invalid_argument);
}

TEST_CASE("denoiser stops at geometric edges") {
    const int n = 32;
    GBuffer gb = flat_gbuffer(n, n);
    ImageBuffer img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            if (x >= n / 2) {
                gb.at({x, y}).normal = {1, 0, 0};  // a wall at right angles
                img.at(x, y) = Rgb{1.0};
            }
    const ImageBuffer edge_aware = atrous_denoise(img, gb);
    const ImageBuffer blind = atrous_denoise(img, flat_gbuffer(n, n));
    const double leak_aware = scalar_contribution(edge_aware.at(n / 2 - 1, n / 2));
    const double leak_blind = scalar_contribution(blind.at(n / 2 - 1, n / 2));
    CHECK(leak_aware < 0.01 * leak_blind);
}

TEST_CASE("parallel denoiser is bit-identical to the serial reference") {
    RandomStream rng(4, 4);
    const GBuffer gb = random_gbuffer(48, 40, rng);
    ImageBuffer img(48, 40);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        if (rng.uniform() < 0.1)
            img[i] = Rgb{rng.uniform(), rng.uniform(), 10.0 * rng.uniform()};
    const ImageBuffer a = atrous_denoise(img, gb), b = serial::atrous_denoise(img, gb);
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        CHECK(a[i].r == b[i].r);
        CHECK(a[i].g == b[i].g);
        CHECK(a[i].b == b[i].b);
    }
}

TEST_CASE("dilated support") {
    ImageBuffer img(10, 10);
    img.at(1, 2) = Rgb{1.0};
    const std::vector<uint8_t> s = dilated_support(img, 2);
    int count = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            const bool inside = x <= 3 && y >= 0 && y <= 4;
            CHECK(bool(s[y * 10 + x]) == inside);
            count += s[y * 10 + x];
        }
    CHECK(count == 4 * 5);
}

TEST_CASE("guidance image is normalized to a peak of one") {
    const GBuffer gb = flat_gbuffer(16, 16);
    ImageBuffer splat(16, 16);
    splat.at(3, 3) = Rgb{8.0};
    splat.at(10, 12) = Rgb{2.0};
    const GuidanceImage g = build_guidance(splat, gb, 3);
    CHECK(g.partition == 3);
    CHECK(g.D.max_luminance() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.D.all_finite());

    const GuidanceImage dark = build_guidance(ImageBuffer(16, 16), gb, 0);
    CHECK(dark.D.max_luminance() == 0.0);
    CHECK(dark.visibility({5, 5}) == kDefaultVisibilityEpsilon);
    CHECK_THROWS_AS(build_guidance(splat, gb, 0, 0.0), std::invalid_argument);
}

TEST_CASE("visibility surrogate") {
    GuidanceImage g;
    g.D = ImageBuffer(3, 1);
    g.D.at(0, 0) = Rgb{0.5};
    g.D.at(2, 0) = Rgb{1e-3};
    CHECK(g.visibility({0, 0}) == 1.0);
    CHECK(g.visibility({1, 0}) == 1e-3);
    CHECK(g.visibility({2, 0}) == 1e-3);  // strictly above epsilon counts as visible
}

TEST_CASE("offset set construction") {
    const OffsetSet three = OffsetSet::from_half({{2, 1}}, 3.0);
    CHECK(three.offsets == std::vector<PixelOffset>{{2, 1}, {0, 0}, {-2, -1}});

    for (int size : {9, 33, 129})
        for (double r : {8.0, 24.0, 44.0}) {
            const OffsetSet s = build_offsets(size, r);
            REQUIRE(s.size() == static_cast<std::size_t>(size));
            CHECK(s.offsets[size / 2] == PixelOffset{0, 0});
            std::map<PixelOffset, int> count;
            for (const PixelOffset& o : s.offsets) {
                ++count[o];
                CHECK(o.dx * o.dx + o.dy * o.dy <= r * r);
            }
            for (const auto& [o, c] : count)
                CHECK(count[-o] == c);
            for (int i = 0; i < size / 2; ++i)
                CHECK(s.offsets[size / 2 + 1 + i] == -s.offsets[i]);
        }
    CHECK(build_offsets(9, 8.0, 1).offsets != build_offsets(9, 8.0, 50).offsets);
    CHECK_THROWS_AS(build_offsets(8, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(build_offsets(1, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(build_offsets(9, 0.5), std::invalid_argument);
}

TEST_CASE("full kernel covers every shift in the disk once") {
    const OffsetSet s = build_full_offsets(3.0);
    int expected = 0;
    for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx)
            expected += dx * dx + dy * dy <= 9;
    CHECK(s.size() == static_cast<std::size_t>(expected));
    std::map<PixelOffset, int> count;
    for (const PixelOffset& o : s.offsets)
        ++count[o];
    CHECK(count.size() == s.size());
    CHECK(s.offsets[s.size() / 2] == PixelOffset{0, 0});
    for (std::size_t i = 0; i < s.size() / 2; ++i)
        CHECK(s.offsets[s.size() / 2 + 1 + i] == -s.offsets[i]);
}

TEST_CASE("identical texels give uniform candidate weights") {
    GBuffer gb(21, 21);
    FirstHit t = flat_texel(0, 0);
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x)
            gb.at({x, y}) = t;  // same position and normal everywhere
    GuidanceImage g;
    g.D = ImageBuffer(21, 21);
    for (std::size_t i = 0; i < g.D.pixel_count(); ++i)
        g.D[i] = Rgb{1.0};
    const ReconnectionVertex x{{0, 0, 3}, {0, 0, -1}, false};
    const CandidateSet cs = candidate_weights({10, 10}, build_offsets(33, 8.0), g, gb, x);
    REQUIRE(!cs.empty());
    for (const Candidate& c : cs.candidates)
        CHECK(c.weight == doctest::Approx(cs.candidates.front().weight).epsilon(1e-14));
}

TEST_CASE("a visibility floor scales the weight by epsilon") {
    const GBuffer gb = flat_gbuffer(21, 21);
    GuidanceImage lit, half;
    lit.D = half.D = ImageBuffer(21, 21);
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x) {
            lit.D.at(x, y) = Rgb{1.0};
            half.D.at(x, y) = x < 10 ? Rgb{} : Rgb{1.0};
        }
    const ReconnectionVertex x{{10, 10, 4}, {0, 0, -1}, false};
    const OffsetSet offsets = build_offsets(33, 8.0);
    const CandidateSet a = candidate_weights({10, 10}, offsets, lit, gb, x);
    const CandidateSet b = candidate_weights({10, 10}, offsets, half, gb, x);
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        const double scale = a.candidates[i].pixel.x < 10 ? kDefaultVisibilityEpsilon : 1.0;
        CHECK(b.candidates[i].weight == doctest::Approx(scale * a.candidates[i].weight).epsilon(1e-12));
    }
}

TEST_CASE("candidate weights match an independent evaluation") {
    RandomStream rng(77, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 30, h = 26;
        const GBuffer gb = random_gbuffer(w, h, rng);
        const GuidanceImage g = random_guidance(w, h, rng, 0.3);
        ReconnectionVertex x = random_vertex(w, h, rng);
        const OffsetSet offsets = build_offsets(65, 12.0, 1 + trial);
        const PixelCoord center{int(rng.uniform() * w), int(rng.uniform() * h)};
        const CandidateSet cs = candidate_weights(center, offsets, g, gb, x);

        std::vector<double> base;
        double peak = 0.0;
        for (const PixelOffset& o : offsets.offsets) {
            const PixelCoord p{center.x + o.dx, center.y + o.dy};
            if (p.x < 0 || p.y < 0 || p.x >= w || p.y >= h) {
                base.push_back(-1.0);
                continue;
            }
            const FirstHit& t = gb.at(p);
            const double lum_d = 0.2126 * g.D.at(p.x, p.y).r + 0.7152 * g.D.at(p.x, p.y).g + 0.0722 * g.D.at(p.x, p.y).b;
            const double v = lum_d > g.epsilon ? 1.0 : g.epsilon;
            double b = 0.0;
            if (t.valid && x.terminal) {
                b = (0.2126 * t.g.r + 0.7152 * t.g.g + 0.0722 * t.g.b) * v;
            } else if (t.valid && !t.emitter) {
                const double dx = x.position.x - t.position.x, dy = x.position.y - t.position.y,
                             dz = x.position.z - t.position.z;
                const double d2 = dx * dx + dy * dy + dz * dz, d = std::sqrt(d2);
                const double cj = (t.normal.x * dx + t.normal.y * dy + t.normal.z * dz) / d;
                const double cx = -(x.normal.x * dx + x.normal.y * dy + x.normal.z * dz) / d;
                const double rho = 0.2126 * t.g.r * t.albedo.r + 0.7152 * t.g.g * t.albedo.g +
                                   0.0722 * t.g.b * t.albedo.b;
                b = cj > 0.0 && cx > 0.0 ? rho / kPi * cj * cx / d2 * v : 0.0;
            }
            base.push_back(b);
            peak = std::max(peak, b);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            double expect = base[i] < 0.0 ? 0.0 : (peak > 0.0 ? std::max(base[i], 1e-8 * peak) : 1.0);
            CHECK(cs.candidates[i].weight == doctest::Approx(expect).epsilon(1e-10));
            total += expect;
        }
        CHECK(cs.total == doctest::Approx(total).epsilon(1e-10));
    }
}

TEST_CASE("off-image candidates have zero weight and an off-image centre gives an empty set") {
    const GBuffer gb = flat_gbuffer(8, 8);
    GuidanceImage g;
    g.D = ImageBuffer(8, 8);
    const ReconnectionVertex x{{4, 4, 3}, {0, 0, -1}, false};
    const OffsetSet offsets = OffsetSet::from_half({{5, 0}, {1, 1}}, 5.0);
    const CandidateSet cs = candidate_weights({6, 6}, offsets, g, gb, x);
    CHECK(cs.candidates[0].weight == 0.0);  // (11, 6)
    CHECK(cs.candidates[1].weight > 0.0);
    CHECK(cs.candidates[4].weight > 0.0);   // (1, 6)
    CHECK(candidate_weights({8, 0}, offsets, g, gb, x).empty());
}

TEST_CASE("candidate sampling frequencies follow the weights") {
    CandidateSet cs;
    cs.candidates = {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{2, 0}, 2.0}};
    cs.total = 4.0;
    RandomStream rng(3, 3);
    const int n = 100000;
    int hits[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i)
        ++hits[sample_candidate(cs, rng.uniform()).index];
    const double p[3] = {0.25, 0.25, 0.5};
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(hits[k] / double(n) - p[k]) < 3.0 * std::sqrt(p[k] * (1 - p[k]) / n));
    CHECK(sample_candidate(cs, 0.6).probability == 0.5);

    CandidateSet one;
    one.candidates = {{{0, 0}, 0.0}, {{5, 5}, 3.0}, {{1, 0}, 0.0}};
    one.total = 3.0;
    for (double u : {0.0, 0.5, std::nextafter(1.0, 0.0)}) {
        const CandidateDraw d = sample_candidate(one, u);
        CHECK(d.pixel == PixelCoord{5, 5});
        CHECK(d.probability == 1.0);
    }
    CHECK_THROWS_AS(sample_candidate(CandidateSet{}, 0.5), std::invalid_argument);
}

TEST_CASE("uniform weights give every candidate the same frequency") {
    const GBuffer gb = flat_gbuffer(64, 64);
    GuidanceImage g;
    g.D = ImageBuffer(64, 64);
    const ReconnectionVertex x{{32, 32, 1}, {0, 0, -1}, true};
    const OffsetSet offsets = build_full_offsets(2.0);
    const CandidateSet cs = candidate_weights({32, 32}, offsets, g, gb, x);
    RandomStream rng(2, 2);
    const int n = 130000;
    std::vector<double> obs(cs.candidates.size(), 0.0), exp(cs.candidates.size(), double(n) / cs.candidates.size());
    for (int i = 0; i < n; ++i)
        obs[sample_candidate(cs, rng.uniform()).index] += 1.0;
    CHECK(chi_square_p(obs, exp) > 0.01);
}

TEST_CASE("proposal probabilities over a neighbourhood sum to one") {
    RandomStream rng(8, 8);
    for (int trial = 0; trial < 100; ++trial) {
        const GBuffer gb = random_gbuffer(20, 20, rng);
        const GuidanceImage g = random_guidance(20, 20, rng, 0.5);
        const CandidateSet cs = candidate_weights({int(rng.uniform() * 20), int(rng.uniform() * 20)},
                                                  build_offsets(33, 10.0, trial + 1), g, gb, random_vertex(20, 20, rng));
        REQUIRE(!cs.empty());
        std::map<std::pair<int, int>, double> T;
        for (const Candidate& c : cs.candidates)
            T[{c.pixel.x, c.pixel.y}] = cs.probability_of(c.pixel);
        double sum = 0.0;
        for (const auto& [p, t] : T)
            sum += t;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("guided acceptance") {
    CHECK(guided_acceptance(2.0, 2.0, 1.0, 1.0, 5.0, 5.0) == 1.0);
    CHECK(guided_acceptance(2.0, 0.0, 1.0, 1.0, 5.0, 5.0) == 0.0);
    CHECK(guided_acceptance(1.0, 0.5, 1.0, 2.0, 4.0, 4.0) == doctest::Approx(0.25));
    CHECK(guided_acceptance(1.0, 3.0, 2.0, 1.0, 4.0, 2.0) == 1.0);
    CHECK(guided_acceptance(1.0, 1.0, 1.0, 1.0, 2.0, 4.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(guided_acceptance(0.0, 1.0, 1.0, 1.0, 1.0, 1.0), std::logic_error);
    CHECK_THROWS_AS(guided_acceptance(1.0, 1.0, 1.0, 0.0, 1.0, 1.0), std::logic_error);
}

TEST_CASE("guided chain on a synthetic image target samples the target") {
    const int w = 16, h = 16;
    RandomStream setup(21, 0);
    GBuffer gb = random_gbuffer(w, h, setup);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            FirstHit& t = gb.at({x, y});
            t.valid = true;
            t.emitter = false;
            t.albedo = Rgb{0.2 + 0.8 * setup.uniform()};
            t.normal = normalize(Vec3{setup.uniform() - 0.5, setup.uniform() - 0.5, 1.0});
        }
    // the proposal must not be far below the target anywhere, or the chain
    // sticks in the under-proposed pixels and the thinned samples stay correlated
    const GuidanceImage g = random_guidance(w, h, setup, 0.0);
    const ReconnectionVertex xv{{8, 8, 6}, {0, 0, -1}, false};
    // target: the guidance weight times an independent random factor the proposal does not know
    std::vector<double> target(w * h);
    double mass = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double base = candidate_base_weight(gb.at({x, y}), xv, 1.0);
            target[y * w + x] = base * (0.25 + setup.uniform());
            mass += target[y * w + x];
        }
    const OffsetSet offsets = build_offsets(33, 9.0);

    RandomStream rng(21, 1);
    PixelCoord cur{8, 8};
    const int steps = 1000000, thin = 10;
    std::vector<double> obs(w * h, 0.0);
    for (int i = 0; i < steps; ++i) {
        const CandidateSet fwd = candidate_weights(cur, offsets, g, gb, xv);
        const CandidateDraw d = sample_candidate(fwd, rng.uniform());
        const CandidateSet rev = candidate_weights(d.pixel, offsets, g, gb, xv);
        const double a = guided_acceptance(target[cur.y * w + cur.x], target[d.pixel.y * w + d.pixel.x],
                                           rev.weight_of(cur), fwd.weight_of(d.pixel), fwd.total, rev.total);
        if (rng.uniform() < a)
            cur = d.pixel;
        if (i % thin == 0)
            obs[cur.y * w + cur.x] += 1.0;
    }
    std::vector<double> exp(w * h);
    for (int i = 0; i < w * h; ++i)
        exp[i] = target[i] / mass * (steps / thin);
    CHECK(chi_square_p(obs, exp) > 0.01);
}

TEST_CASE("every proposable move can be reversed") {
    RandomStream rng(10, 10);
    int checked = 0;
    for (int config = 0; config < 10000; ++config) {
        const int w = 4 + int(rng.uniform() * 37), h = 4 + int(rng.uniform() * 37);
        const GBuffer gb = random_gbuffer(w, h, rng);
        const GuidanceImage g = random_guidance(w, h, rng, rng.uniform());
        const ReconnectionVertex x = random_vertex(w, h, rng);
        const int size = 3 + 2 * int(rng.uniform() * 64);
        const double radius = 1.0 + 30.0 * rng.uniform();
        const OffsetSet offsets = build_offsets(size, radius, 1 + uint64_t(rng.uniform() * 1000));
        const PixelCoord c{int(rng.uniform() * w), int(rng.uniform() * h)};
        const CandidateSet fwd = candidate_weights(c, offsets, g, gb, x);
        REQUIRE(!fwd.empty());
        for (const Candidate& cand : fwd.candidates) {
            if (!(cand.weight > 0.0))
                continue;
            const CandidateSet rev = candidate_weights(cand.pixel, offsets, g, gb, x);
            CHECK(rev.weight_of(c) > 0.0);
            ++checked;
        }
    }
    CHECK(checked > 10000);
}
