#include "partmc/guidance/denoise.h"

#include <cmath>
#include <stdexcept>

namespace partmc {

namespace {

constexpr double kTaps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

void check_sizes(const ImageBuffer& image, const GBuffer& gbuffer) {
    if (image.width() != gbuffer.width() || image.height() != gbuffer.height())
        throw std::invalid_argument("atrous_denoise: image and GBuffer sizes differ");
}

double edge_weight(const FirstHit& p, const FirstHit& q, const AtrousParams& params) {
    const double dn = 1.0 - dot(p.normal, q.normal);
    const Rgb da = p.albedo - q.albedo;
    const double dalb = std::sqrt(da.r * da.r + da.g * da.g + da.b * da.b);
    const double ddep = std::abs(p.distance - q.distance) / std::max(p.distance, 1e-6);
    return std::exp(-std::max(dn, 0.0) / params.sigma_normal - dalb / params.sigma_albedo -
                    ddep / params.sigma_depth);
}

void filter_row(const ImageBuffer& in, ImageBuffer& out, const GBuffer& gb, const std::vector<uint8_t>& region,
                int y, int step, const AtrousParams& params) {
    const int w = in.width(), h = in.height();
    for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!region[i]) {
            out[i] = in[i];
            continue;
        }
        const FirstHit& cp = gb[i];
        Rgb sum;
        double wsum = 0.0;
        for (int b = 0; b < 5; ++b) {
            const int qy = y + (b - 2) * step;
            if (qy < 0 || qy >= h)
                continue;
            for (int a = 0; a < 5; ++a) {
                const int qx = x + (a - 2) * step;
                if (qx < 0 || qx >= w)
                    continue;
                const std::size_t j = static_cast<std::size_t>(qy) * w + qx;
                const double wt = kTaps[a] * kTaps[b] * (j == i ? 1.0 : edge_weight(cp, gb[j], params));
                sum += in[j] * wt;
                wsum += wt;
            }
        }
        out[i] = sum / wsum;
    }
}

template <bool Parallel>
ImageBuffer denoise(const ImageBuffer& image, const GBuffer& gbuffer, const AtrousParams& params) {
    check_sizes(image, gbuffer);
    const std::vector<uint8_t> region = dilated_support(image, atrous_footprint(params.iterations));
    ImageBuffer a = image, b(image.width(), image.height());
    const int h = image.height();
    for (int it = 0; it < params.iterations; ++it) {
        const int step = 1 << it;
        if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
            for (int y = 0; y < h; ++y)
                filter_row(a, b, gbuffer, region, y, step, params);
        } else {
            for (int y = 0; y < h; ++y)
                filter_row(a, b, gbuffer, region, y, step, params);
        }
        std::swap(a, b);
    }
    return a;
}

}  // namespace

int atrous_footprint(int iterations) { return 2 * ((1 << iterations) - 1); }

std::vector<uint8_t> dilated_support(const ImageBuffer& image, int radius) {
    const int w = image.width(), h = image.height();
    // separable max-norm dilation through running counts
    std::vector<int> row(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        std::vector<int> prefix(w + 1, 0);
        for (int x = 0; x < w; ++x)
            prefix[x + 1] = prefix[x] + !image.at(x, y).is_black();
        for (int x = 0; x < w; ++x)
            row[static_cast<std::size_t>(y) * w + x] =
                prefix[std::min(w, x + radius + 1)] - prefix[std::max(0, x - radius)] > 0;
    }
    std::vector<uint8_t> out(row.size(), 0);
    for (int x = 0; x < w; ++x) {
        std::vector<int> prefix(h + 1, 0);
        for (int y = 0; y < h; ++y)
            prefix[y + 1] = prefix[y] + row[static_cast<std::size_t>(y) * w + x];
        for (int y = 0; y < h; ++y)
            out[static_cast<std::size_t>(y) * w + x] =
                prefix[std::min(h, y + radius + 1)] - prefix[std::max(0, y - radius)] > 0;
    }
    return out;
}

ImageBuffer atrous_denoise(const ImageBuffer& image, const GBuffer& gbuffer, const AtrousParams& params) {
    return denoise<true>(image, gbuffer, params);
}

namespace serial {
ImageBuffer atrous_denoise(const ImageBuffer& image, const GBuffer& gbuffer, const AtrousParams& params) {
    return denoise<false>(image, gbuffer, params);
}
}  // namespace serial

}  // namespace partmc
