#include "partmc/path/prepass.h"

#include <stdexcept>

namespace partmc {

namespace {

struct TaggedRecord {
    Signature signature;
    PathRecord record;
};

void collect(const std::vector<Path>& paths, PixelCoord pixel, std::vector<TaggedRecord>& out) {
    for (const Path& p : paths) {
        if (p.f.is_black() || !(p.pdf > 0.0))
            continue;
        const Rgb c = p.f / p.pdf;
        if (!c.is_finite())
            continue;
        out.push_back({p.signature(), {c, scalar_contribution(c), pixel, p.seed, p.emission_index}});
    }
}

void file_records(Census& census, std::vector<TaggedRecord>& records) {
    for (TaggedRecord& t : records) {
        PartitionBuffer& buf = census[t.signature];
        if (buf.records.empty())
            buf.signature = t.signature;
        buf.records.push_back(t.record);
    }
    records.clear();
}

void finish(PrepassResult& result) {
    for (auto& [sig, buf] : result.census)
        buf.gamma = first_half_gamma(buf);
}

void check_budget(int paths_per_pixel) {
    if (paths_per_pixel < 2)
        throw std::invalid_argument("pre-pass needs at least 2 paths per pixel");
}

}  // namespace

StreamId prepass_stream(uint64_t seed, int pass, PixelCoord pixel, int width, int height) {
    const uint64_t pixels = static_cast<uint64_t>(width) * height;
    return {seed, static_cast<uint64_t>(pass) * pixels + static_cast<uint64_t>(pixel.y) * width + pixel.x};
}

PrepassResult run_prepass(const Scene& scene, int paths_per_pixel, uint64_t seed) {
    check_budget(paths_per_pixel);
    const int w = scene.camera().width(), h = scene.camera().height();
    PrepassResult result{{}, GBuffer(w, h), w, h, paths_per_pixel, seed};
    std::vector<std::vector<TaggedRecord>> rows(h);

    for (int pass = 0; pass < paths_per_pixel; ++pass) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const PixelCoord px{x, y};
                RandomStream stream(prepass_stream(seed, pass, px, w, h));
                FirstHit* fh = pass == 0 ? &result.gbuffer.at(px) : nullptr;
                collect(trace_path(scene, px, stream, fh), px, rows[y]);
            }
        }
        for (auto& row : rows)
            file_records(result.census, row);
    }
    finish(result);
    return result;
}

namespace serial {

PrepassResult run_prepass(const Scene& scene, int paths_per_pixel, uint64_t seed) {
    check_budget(paths_per_pixel);
    const int w = scene.camera().width(), h = scene.camera().height();
    PrepassResult result{{}, GBuffer(w, h), w, h, paths_per_pixel, seed};
    std::vector<TaggedRecord> scratch;
    for (int pass = 0; pass < paths_per_pixel; ++pass) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const PixelCoord px{x, y};
                FirstHit* fh = pass == 0 ? &result.gbuffer.at(px) : nullptr;
                collect(trace_path(scene, px, RandomStream(prepass_stream(seed, pass, px, w, h)), fh), px, scratch);
                file_records(result.census, scratch);
            }
        }
    }
    finish(result);
    return result;
}

}  // namespace serial

double first_half_gamma(const PartitionBuffer& buffer) {
    const std::size_t half = buffer.records.size() / 2;
    double sum = 0.0;
    for (std::size_t i = 0; i < half; ++i)
        sum += buffer.records[i].scalar;
    return sum;
}

std::optional<Path> replay_record(const Scene& scene, const PathRecord& record) {
    return replay_path(scene, record.pixel, record.seed, record.emission);
}

ImageBuffer splat_records(const std::vector<const PartitionBuffer*>& buffers, int width, int height,
                          int paths_per_pixel) {
    ImageBuffer img(width, height);
    const double inv = 1.0 / paths_per_pixel;
    for (const PartitionBuffer* buf : buffers)
        for (const PathRecord& r : buf->records)
            img.splat(r.pixel, r.c * inv, 1.0);
    return img;
}

void write_census_csv(const Census& census, std::ostream& out) {
    out << "signature,paths,gamma\n";
    for (const auto& [sig, buf] : census)
        out << sig.str() << ',' << buf.records.size() << ',' << buf.gamma << '\n';
}

}  // namespace partmc
