#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>

namespace partmc {

/// Linear RGB radiance triple.
struct Rgb {
    double r = 0, g = 0, b = 0;

    constexpr Rgb() = default;
    constexpr Rgb(double r_, double g_, double b_) : r(r_), g(g_), b(b_) {}
    constexpr explicit Rgb(double v) : r(v), g(v), b(v) {}

    constexpr Rgb operator+(const Rgb& o) const { return {r + o.r, g + o.g, b + o.b}; }
    constexpr Rgb operator-(const Rgb& o) const { return {r - o.r, g - o.g, b - o.b}; }
    constexpr Rgb operator*(const Rgb& o) const { return {r * o.r, g * o.g, b * o.b}; }
    constexpr Rgb operator*(double s) const { return {r * s, g * s, b * s}; }
    constexpr Rgb operator/(double s) const { return {r / s, g / s, b / s}; }
    constexpr Rgb& operator+=(const Rgb& o) { r += o.r; g += o.g; b += o.b; return *this; }
    constexpr Rgb& operator*=(const Rgb& o) { r *= o.r; g *= o.g; b *= o.b; return *this; }
    constexpr Rgb& operator*=(double s) { r *= s; g *= s; b *= s; return *this; }
    constexpr bool operator==(const Rgb&) const = default;

    constexpr double operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }

    constexpr double max_channel() const { return std::max(r, std::max(g, b)); }
    constexpr bool is_black() const { return r == 0 && g == 0 && b == 0; }
    bool is_finite() const { return std::isfinite(r) && std::isfinite(g) && std::isfinite(b); }
    bool is_nonnegative() const { return r >= 0 && g >= 0 && b >= 0; }

    /// Construction from a physical quantity: negative round-off is clamped to zero.
    static Rgb clamped(double r, double g, double b) {
        return {std::max(0.0, r), std::max(0.0, g), std::max(0.0, b)};
    }
};

constexpr Rgb operator*(double s, const Rgb& c) { return c * s; }

/// Rec.709 luminance; the scalar contribution f* used as the MCMC target.
inline double scalar_contribution(const Rgb& c) {
    assert(c.is_finite());
    return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

}  // namespace partmc
