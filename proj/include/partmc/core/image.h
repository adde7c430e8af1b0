#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "partmc/core/rgb.h"

namespace partmc {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PixelCoord {
    int x = 0;
    int y = 0;

    constexpr bool operator==(const PixelCoord&) const = default;
};

/// Row-major RGB image with a per-pixel accumulation weight.
/// Single writer; parallel accumulation uses one buffer per worker and merge().
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }

    bool contains(PixelCoord p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
    std::size_t index(PixelCoord p) const { return static_cast<std::size_t>(p.y) * width_ + p.x; }

    Rgb& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    const Rgb& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    Rgb& operator[](std::size_t i) { return pixels_[i]; }
    const Rgb& operator[](std::size_t i) const { return pixels_[i]; }

    double& weight(std::size_t i) { return weights_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    std::span<Rgb> pixels() { return pixels_; }
    std::span<const Rgb> pixels() const { return pixels_; }

    void splat(PixelCoord p, const Rgb& value, double weight = 1.0);
    void scale(double s);
    /// Pixel-wise sum of another buffer of the same size (values and weights).
    void merge(const ImageBuffer& other);

    Rgb mean() const;
    double mean_luminance() const;
    double max_luminance() const;
    bool all_finite() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
    std::vector<double> weights_;
};

/// Root mean squared difference over all pixels and the three channels.
double rmse(const ImageBuffer& a, const ImageBuffer& b);

void write_pfm(const ImageBuffer& image, const std::filesystem::path& path);
ImageBuffer read_pfm(const std::filesystem::path& path);

/// 8-bit binary PPM, gamma 2.2, clamped to [0, 1].
void write_ppm(const ImageBuffer& image, const std::filesystem::path& path);
/// Byte value of one channel in write_ppm's encoding.
unsigned char encode_ppm_channel(double linear);

}  // namespace partmc
