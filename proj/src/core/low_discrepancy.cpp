#include "partmc/core/low_discrepancy.h"

#include <array>
#include <cassert>
#include <cmath>

namespace partmc {

namespace {
constexpr std::array<unsigned, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
}

double radical_inverse(uint64_t index, unsigned base) {
    const double inv_base = 1.0 / base;
    double inv_bi = 1.0;
    double result = 0.0;
    while (index > 0) {
        const uint64_t next = index / base;
        const uint64_t digit = index - next * base;
        inv_bi *= inv_base;
        result += static_cast<double>(digit) * inv_bi;
        index = next;
    }
    // Guard against round-up to exactly 1.0 for very large indices.
    return std::min(result, 0x1.fffffffffffffp-1);
}

Vec2 ld_point(uint64_t index, unsigned dim_pair) {
    assert(2 * dim_pair + 1 < kPrimes.size());
    return {radical_inverse(index, kPrimes[2 * dim_pair]), radical_inverse(index, kPrimes[2 * dim_pair + 1])};
}

PixelOffset map_to_disk_offset(double u, double v, double radius) {
    assert(radius >= 1.0);
    const double r = u * u * radius;
    const double theta = 2.0 * kPi * v;
    const double fx = r * std::cos(theta);
    const double fy = r * std::sin(theta);
    PixelOffset o{static_cast<int>(std::lround(fx)), static_cast<int>(std::lround(fy))};
    if (static_cast<double>(o.dx) * o.dx + static_cast<double>(o.dy) * o.dy > radius * radius)
        o = {static_cast<int>(std::trunc(fx)), static_cast<int>(std::trunc(fy))};
    return o;
}

}  // namespace partmc
