#pragma once

#include <cstdint>

#include "partmc/core/math.h"

namespace partmc {

/// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(uint64_t index, unsigned base);

/// index-th point of a 2D Halton sequence. dim_pair 0 uses bases (2, 3),
/// pair 1 uses (5, 7), and so on through the first primes.
Vec2 ld_point(uint64_t index, unsigned dim_pair = 0);

struct PixelOffset {
    int dx = 0;
    int dy = 0;

    constexpr PixelOffset operator-() const { return {-dx, -dy}; }
    constexpr bool operator==(const PixelOffset&) const = default;
    constexpr auto operator<=>(const PixelOffset&) const = default;
};

/// (u, v) -> polar (r, theta) = (u^2 * radius, 2 pi v) -> nearest integer pixel shift.
/// The squared radius keeps more offsets close to the centre. Never leaves the disk.
PixelOffset map_to_disk_offset(double u, double v, double radius);

}  // namespace partmc
