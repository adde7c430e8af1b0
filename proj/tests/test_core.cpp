#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "partmc/core/image.h"
#include "partmc/core/low_discrepancy.h"
#include "partmc/core/random.h"
#include "partmc/core/rgb.h"

using namespace partmc;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("partmc_test_core_" + name);
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("scalar contribution is Rec.709 luminance") {
    CHECK(scalar_contribution({1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(scalar_contribution({0, 0, 0}) == 0.0);
    // 0.2126 * 0.5 + 0.7152 * 0.25 = 0.1063 + 0.1788
    CHECK(scalar_contribution({0.5, 0.25, 0.0}) == doctest::Approx(0.2851).epsilon(1e-14));
}

TEST_CASE("scalar contribution is linear for nonnegative scales") {
    RandomStream rng(3, 0);
    for (int i = 0; i < 1000; ++i) {
        const Rgb c{rng.uniform(), rng.uniform() * 5.0, rng.uniform() * 0.1};
        const double a = rng.uniform() * 100.0;
        const double lhs = scalar_contribution(c * a);
        const double rhs = a * scalar_contribution(c);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1e-300, std::abs(rhs)));
    }
}

TEST_CASE("random streams are reproducible and distinct") {
    RandomStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true;
    int same_as_other_stream = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        const uint64_t x = a.next_u64();
        all_equal &= (x == b.next_u64());
        same_as_other_stream += (x == c.next_u64());
    }
    CHECK(all_equal);
    CHECK(same_as_other_stream == 0);
}

TEST_CASE("random stream uniforms are in [0, 1) with the right mean") {
    RandomStream rng(1, 1);
    const int n = 200'000;
    double sum = 0.0;
    bool in_range = true;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        in_range &= (u >= 0.0 && u < 1.0);
        sum += u;
    }
    CHECK(in_range);
    // sd of the mean = sqrt(1/12 / n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("a stream recreated from its id continues identically") {
    RandomStream a(9, 123);
    RandomStream b(a.id());
    for (int i = 0; i < 100; ++i)
        CHECK(a.uniform() == b.uniform());
    CHECK(a.counter() == 100);
}

TEST_CASE("Halton points") {
    CHECK(ld_point(0) == Vec2(0.0, 0.0));
    const Vec2 p1 = ld_point(1);
    CHECK(p1.x == 0.5);
    CHECK(p1.y == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const Vec2 p2 = ld_point(2);
    CHECK(p2.x == 0.25);
    CHECK(p2.y == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // base 2 radical inverse of 6 = 0.011b = 0.375
    CHECK(radical_inverse(6, 2) == 0.375);
}

TEST_CASE("disk offset mapping") {
    CHECK(map_to_disk_offset(0.0, 0.7, 8.0) == PixelOffset{0, 0});
    CHECK(map_to_disk_offset(1.0 - 1e-12, 0.0, 8.0) == PixelOffset{8, 0});
    CHECK(map_to_disk_offset(0.5, 0.25, 8.0) == PixelOffset{0, 2});
}

TEST_CASE("disk offsets never leave the disk") {
    RandomStream rng(5, 5);
    for (double radius : {1.0, 2.5, 8.0, 24.0, 44.0, 128.0}) {
        bool inside = true;
        for (int i = 0; i < 100'000; ++i) {
            const PixelOffset o = map_to_disk_offset(rng.uniform(), rng.uniform(), radius);
            inside &= (o.dx * o.dx + o.dy * o.dy <= radius * radius);
        }
        CHECK(inside);
    }
}

TEST_CASE("rmse") {
    ImageBuffer a(1, 1), b(1, 1);
    CHECK(rmse(a, b) == 0.0);
    a.at(0, 0) = {1, 1, 1};
    CHECK(rmse(a, b) == doctest::Approx(1.0));
    a.at(0, 0) = {1, 0, 0};
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(rmse(a, ImageBuffer(2, 1)), ImageError);
}

TEST_CASE("image buffers reject empty sizes and merge by summation") {
    CHECK_THROWS_AS(ImageBuffer(0, 3), ImageError);
    ImageBuffer a(2, 2), b(2, 2);
    a.splat({1, 1}, {1, 2, 3});
    b.splat({1, 1}, {1, 1, 1}, 2.0);
    a.merge(b);
    CHECK(a.at(1, 1) == Rgb(2, 3, 4));
    CHECK(a.weight(a.index({1, 1})) == 2.0 + 1.0);
}

TEST_CASE("PFM round trip is exact") {
    const auto path = temp_file("rt.pfm");
    SUBCASE("single pixel") {
        ImageBuffer img(1, 1);
        img.at(0, 0) = {0.5, 0.5, 0.5};
        write_pfm(img, path);
        const ImageBuffer back = read_pfm(path);
        CHECK(back.at(0, 0) == img.at(0, 0));
    }
    SUBCASE("gradient") {
        ImageBuffer img(2, 2);
        img.at(0, 0) = {0, 0.25, 0.5};
        img.at(1, 0) = {1, 2, 3};
        img.at(0, 1) = {0.125, 0, 7};
        img.at(1, 1) = {9, 8, 0.0625};
        write_pfm(img, path);
        const ImageBuffer back = read_pfm(path);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x)
                CHECK(back.at(x, y) == img.at(x, y));
    }
    SUBCASE("random float-representable buffers") {
        RandomStream rng(11, 0);
        ImageBuffer img(7, 5);
        for (Rgb& c : img.pixels())
            c = {static_cast<float>(rng.uniform() * 10), static_cast<float>(rng.uniform()),
                 static_cast<float>(rng.uniform() * 1e-3)};
        write_pfm(img, path);
        const ImageBuffer back = read_pfm(path);
        bool same = true;
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            same &= back[i] == img[i];
        CHECK(same);
    }
    std::filesystem::remove(path);
}

TEST_CASE("PFM header layout") {
    const auto path = temp_file("hdr.pfm");
    ImageBuffer img(3, 2);
    write_pfm(img, path);
    const auto bytes = read_bytes(path);
    const std::string header(bytes.begin(), bytes.begin() + 12);
    CHECK(header == "PF\n3 2\n-1.0\n");
    CHECK(bytes.size() == 12 + 3 * 2 * 3 * 4);
    std::filesystem::remove(path);
}

TEST_CASE("PFM rows are stored bottom-up") {
    const auto path = temp_file("rows.pfm");
    ImageBuffer img(1, 2);
    img.at(0, 0) = {1, 1, 1};  // top row
    write_pfm(img, path);
    const auto bytes = read_bytes(path);
    float first;
    std::memcpy(&first, bytes.data() + 12, 4);
    CHECK(first == 0.0f);  // bottom row first
    std::filesystem::remove(path);
}

TEST_CASE("PFM errors") {
    const auto path = temp_file("bad.pfm");
    ImageBuffer img(1, 1);
    img.at(0, 0) = {-0.5, 0, 0};
    CHECK_THROWS_AS(write_pfm(img, path), ImageError);
    {
        std::ofstream out(path);
        out << "P6\n1 1\n255\n";
    }
    CHECK_THROWS_AS(read_pfm(path), ImageError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "PF\n2 2\n-1.0\n" << std::string(10, '\0');
    }
    CHECK_THROWS_AS(read_pfm(path), ImageError);
    CHECK_THROWS_AS(read_pfm(temp_file("does_not_exist.pfm")), ImageError);
    std::filesystem::remove(path);
}

TEST_CASE("PPM encoding") {
    CHECK(encode_ppm_channel(1.0) == 255);
    CHECK(encode_ppm_channel(0.0) == 0);
    CHECK(encode_ppm_channel(0.5) == 186);
    CHECK(encode_ppm_channel(7.0) == 255);
    CHECK(encode_ppm_channel(-1.0) == 0);

    const auto path = temp_file("px.ppm");
    ImageBuffer img(2, 1);
    img.at(0, 0) = {1, 1, 1};
    img.at(1, 0) = {0.5, 0.5, 0.5};
    write_ppm(img, path);
    const auto bytes = read_bytes(path);
    const std::string header = "P6\n2 1\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(std::string(bytes.begin(), bytes.begin() + header.size()) == header);
    CHECK(bytes[header.size() + 0] == 255);
    CHECK(bytes[header.size() + 3] == 186);
    std::filesystem::remove(path);
}
