#pragma once

// Random GBuffer/guidance configurations and statistics shared by the unit
// tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "partmc/core/random.h"
#include "partmc/guidance/guidance.h"

namespace partmc::fixtures {

inline FirstHit flat_texel(int x, int y) {
    FirstHit t;
    t.position = {double(x), double(y), 0.0};
    t.normal = {0, 0, 1};
    t.albedo = Rgb{0.5};
    t.g = Rgb{1.0};
    t.distance = 10.0;
    t.depth = 1;
    t.valid = true;
    return t;
}

inline GBuffer flat_gbuffer(int w, int h) {
    GBuffer gb(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            gb.at({x, y}) = flat_texel(x, y);
    return gb;
}

inline Vec3 random_unit(RandomStream& rng) {
    const double z = 2.0 * rng.uniform() - 1.0, phi = 2.0 * kPi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// Texels with random geometry and materials; some invalid, some emitters, some back-facing.
inline GBuffer random_gbuffer(int w, int h, RandomStream& rng) {
    GBuffer gb(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            FirstHit t = flat_texel(x, y);
            t.position.z = 2.0 * rng.uniform() - 1.0;
            t.normal = rng.uniform() < 0.8 ? normalize(Vec3{rng.uniform() - 0.5, rng.uniform() - 0.5, 1.0})
                                           : random_unit(rng);
            t.albedo = Rgb{rng.uniform(), rng.uniform(), rng.uniform()};
            t.g = Rgb{rng.uniform() + 0.01};
            t.distance = 1.0 + 10.0 * rng.uniform();
            t.valid = rng.uniform() > 0.05;
            t.emitter = rng.uniform() < 0.05;
            if (t.emitter)
                t.albedo = Rgb{};
            gb.at({x, y}) = t;
        }
    return gb;
}

inline GuidanceImage random_guidance(int w, int h, RandomStream& rng, double zero_fraction) {
    GuidanceImage g;
    g.D = ImageBuffer(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            g.D.at(x, y) = rng.uniform() < zero_fraction ? Rgb{} : Rgb{rng.uniform()};
    return g;
}

inline ReconnectionVertex random_vertex(int w, int h, RandomStream& rng) {
    ReconnectionVertex x;
    x.position = {w * rng.uniform(), h * rng.uniform(), 1.0 + 5.0 * rng.uniform()};
    x.normal = rng.uniform() < 0.8 ? Vec3{0, 0, -1} : random_unit(rng);
    x.terminal = rng.uniform() < 0.1;
    return x;
}

inline double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
    double chi2 = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0))
            continue;
        chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
        ++dof;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));
}


inline bool close_rel(const Rgb& a, const Rgb& b, double tol) {
    for (int c = 0; c < 3; ++c) {
        const double scale = std::max(std::abs(a[c]), std::abs(b[c]));
        if (std::abs(a[c] - b[c]) > tol * scale)
            return false;
    }
    return true;
}

}  // namespace partmc::fixtures
