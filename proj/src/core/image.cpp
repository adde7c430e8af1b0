#include "partmc/core/image.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace partmc {

ImageBuffer::ImageBuffer(int width, int height)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(width) * height), weights_(static_cast<std::size_t>(width) * height, 0.0) {
    if (width <= 0 || height <= 0)
        throw ImageError("image dimensions must be positive");
}

void ImageBuffer::splat(PixelCoord p, const Rgb& value, double weight) {
    const std::size_t i = index(p);
    pixels_[i] += value;
    weights_[i] += weight;
}

void ImageBuffer::scale(double s) {
    for (Rgb& c : pixels_)
        c *= s;
}

void ImageBuffer::merge(const ImageBuffer& other) {
    if (other.width_ != width_ || other.height_ != height_)
        throw ImageError("merge: dimension mismatch");
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        pixels_[i] += other.pixels_[i];
        weights_[i] += other.weights_[i];
    }
}

Rgb ImageBuffer::mean() const {
    Rgb sum;
    for (const Rgb& c : pixels_)
        sum += c;
    return pixels_.empty() ? sum : sum / static_cast<double>(pixels_.size());
}

double ImageBuffer::mean_luminance() const { return scalar_contribution(mean()); }

double ImageBuffer::max_luminance() const {
    double m = 0.0;
    for (const Rgb& c : pixels_)
        m = std::max(m, scalar_contribution(c));
    return m;
}

bool ImageBuffer::all_finite() const {
    return std::all_of(pixels_.begin(), pixels_.end(), [](const Rgb& c) { return c.is_finite(); });
}

double rmse(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw ImageError("rmse: dimension mismatch (" + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        const Rgb d = a[i] - b[i];
        sum += d.r * d.r + d.g * d.g + d.b * d.b;
    }
    return std::sqrt(sum / (3.0 * static_cast<double>(a.pixel_count())));
}

// PFM: "PF\n<w> <h>\n-1.0\n", little-endian float RGB, rows stored bottom-up.
void write_pfm(const ImageBuffer& image, const std::filesystem::path& path) {
    for (const Rgb& c : image.pixels())
        if (!c.is_finite() || !c.is_nonnegative())
            throw ImageError("write_pfm: image contains negative or non-finite values");

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageError("write_pfm: cannot open " + path.string());
    out << "PF\n" << image.width() << " " << image.height() << "\n-1.0\n";

    std::vector<char> row(static_cast<std::size_t>(image.width()) * 3 * sizeof(float));
    for (int y = image.height() - 1; y >= 0; --y) {
        char* dst = row.data();
        for (int x = 0; x < image.width(); ++x) {
            const Rgb& c = image.at(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(c[ch]));
                if constexpr (std::endian::native == std::endian::big)
                    bits = __builtin_bswap32(bits);
                std::memcpy(dst, &bits, sizeof bits);
                dst += sizeof bits;
            }
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw ImageError("write_pfm: write failed for " + path.string());
}

ImageBuffer read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageError("read_pfm: cannot open " + path.string());

    std::string magic;
    int width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (!in || magic != "PF")
        throw ImageError("read_pfm: malformed header in " + path.string() + " (expected 'PF', width, height, scale)");
    if (width <= 0 || height <= 0 || scale == 0.0)
        throw ImageError("read_pfm: invalid dimensions or scale in " + path.string());
    in.get();  // single whitespace byte before the raster

    const bool file_little = scale < 0.0;
    const bool swap = file_little != (std::endian::native == std::endian::little);
    ImageBuffer image(width, height);
    std::vector<char> row(static_cast<std::size_t>(width) * 3 * sizeof(float));
    for (int y = height - 1; y >= 0; --y) {
        in.read(row.data(), static_cast<std::streamsize>(row.size()));
        if (in.gcount() != static_cast<std::streamsize>(row.size()))
            throw ImageError("read_pfm: truncated raster in " + path.string());
        const char* src = row.data();
        for (int x = 0; x < width; ++x) {
            float v[3];
            for (float& f : v) {
                uint32_t bits;
                std::memcpy(&bits, src, sizeof bits);
                if (swap)
                    bits = __builtin_bswap32(bits);
                f = std::bit_cast<float>(bits);
                src += sizeof bits;
            }
            image.at(x, y) = Rgb(v[0], v[1], v[2]);
        }
    }
    return image;
}

unsigned char encode_ppm_channel(double linear) {
    const double v = std::clamp(linear, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(255.0 * std::pow(v, 1.0 / 2.2)));
}

void write_ppm(const ImageBuffer& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageError("write_ppm: cannot open " + path.string());
    out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(image.pixel_count() * 3);
    for (const Rgb& c : image.pixels()) {
        bytes.push_back(encode_ppm_channel(c.r));
        bytes.push_back(encode_ppm_channel(c.g));
        bytes.push_back(encode_ppm_channel(c.b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ImageError("write_ppm: write failed for " + path.string());
}

}  // namespace partmc
