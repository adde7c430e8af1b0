#include "partmc/engine/render.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace partmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RandomStream chain_stream(uint64_t seed, uint64_t salt, int index) {
    return RandomStream(seed, 0).split(salt + static_cast<uint64_t>(index));
}

constexpr uint64_t kPartitionSalt = 0x5000;
constexpr uint64_t kMltSalt = 0x9000;

struct PixelStats {
    Rgb sum;
    double lum = 0.0, lum2 = 0.0;
};

void trace_pixel(const Scene& scene, PixelCoord px, int spp, uint64_t seed, PixelStats& out) {
    const int w = scene.camera().width(), h = scene.camera().height();
    for (int s = 0; s < spp; ++s) {
        Rgb c;
        for (const Path& p : trace_path(scene, px, RandomStream(prepass_stream(seed, s, px, w, h))))
            if (!p.f.is_black() && p.pdf > 0.0)
                c += p.f / p.pdf;
        out.sum += c;
        const double l = scalar_contribution(c);
        out.lum += l;
        out.lum2 += l * l;
    }
}

RenderResult finish_pt(std::vector<PixelStats>& stats, int w, int h, int spp) {
    RenderResult r;
    r.image = ImageBuffer(w, h);
    double var_sum = 0.0, total = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const PixelStats& s = stats[i];
        r.image[i] = s.sum / spp;
        r.image.weight(i) = spp;
        const double mean = s.lum / spp;
        const double var = spp > 1 ? std::max(0.0, (s.lum2 - spp * mean * mean) / (spp - 1)) : 0.0;
        var_sum += var / spp;
        total += mean;
    }
    const double n = static_cast<double>(stats.size());
    r.b = total / n;
    r.mean_se = std::sqrt(var_sum) / n;
    return r;
}

template <bool Parallel>
RenderResult pt(const Scene& scene, int spp, uint64_t seed) {
    if (spp < 1)
        throw std::invalid_argument("render_pt: spp must be positive");
    const auto t0 = Clock::now();
    const int w = scene.camera().width(), h = scene.camera().height();
    std::vector<PixelStats> stats(static_cast<std::size_t>(w) * h);
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                trace_pixel(scene, {x, y}, spp, seed, stats[static_cast<std::size_t>(y) * w + x]);
    } else {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                trace_pixel(scene, {x, y}, spp, seed, stats[static_cast<std::size_t>(y) * w + x]);
    }
    RenderResult r = finish_pt(stats, w, h, spp);
    r.seconds["render"] = seconds_since(t0);
    return r;
}

void run_job(const ChainJob& job, ImageBuffer& image, MutationStats& stats) {
    ChainState state = init_chain(*job.partition, *job.ctx.scene, job.burn_in, job.stream,
                                  [&](ChainState& s) { mutate(s, job.ctx); });
    const double k = job.scale / static_cast<double>(job.steps);
    for (uint64_t i = 0; i < job.steps; ++i) {
        mutate(state, job.ctx);
        image.splat(state.current.pixel(), state.current.f * (k / state.fstar));
    }
    stats = state.stats;
}

template <bool Parallel>
ChainRun chains(const std::vector<ChainJob>& jobs, int width, int height) {
    std::vector<ImageBuffer> images(jobs.size());
    ChainRun run;
    run.stats.resize(jobs.size());
    const int n = static_cast<int>(jobs.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int i = 0; i < n; ++i) {
            images[i] = ImageBuffer(width, height);
            run_job(jobs[i], images[i], run.stats[i]);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            images[i] = ImageBuffer(width, height);
            run_job(jobs[i], images[i], run.stats[i]);
        }
    }
    run.image = ImageBuffer(width, height);
    for (const ImageBuffer& img : images)
        run.image.merge(img);
    return run;
}

std::string joined(const std::vector<Signature>& sigs) {
    std::string s;
    for (const Signature& g : sigs)
        s += (s.empty() ? "" : "|") + g.str();
    return s;
}

}  // namespace

void RenderConfig::validate() const {
    if (!(mutations_per_pixel > 0.0))
        throw std::invalid_argument("mutations per pixel must be positive");
    if (spp < 1 || prepass_ppp < 2)
        throw std::invalid_argument("spp must be >= 1 and the pre-pass needs >= 2 paths per pixel");
    if (K < 0 || chains < 0 || burn_in < 0)
        throw std::invalid_argument("K, chains and burn-in must be non-negative");
    if (y_size < 3 || y_size % 2 == 0)
        throw std::invalid_argument("--y-size must be odd and at least 3");
    if (!(radius >= 1.0))
        throw std::invalid_argument("--radius must be at least 1");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("--epsilon must be positive");
    if (!(large_step_probability > 0.0 && large_step_probability <= 1.0))
        throw std::invalid_argument("large-step probability must be in (0, 1]");
    if (large_step_attempts < 1)
        throw std::invalid_argument("large-step attempts must be at least 1");
    if (!(lens.r_min > 0.0 && lens.r_max >= lens.r_min))
        throw std::invalid_argument("lens radii must satisfy 0 < r_min <= r_max");
}

std::vector<uint64_t> allocate_budget(const PartitionSet& set, uint64_t total, double floor) {
    const std::size_t n = set.partitions.size();
    std::vector<double> w(n, 0.0);
    std::vector<bool> eligible(n, false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Partition& p = set.partitions[i];
        eligible[i] = p.b > 0.0 && !p.reservoir.empty();
        count += eligible[i];
        if (eligible[i])
            w[i] = p.P;
    }
    std::vector<uint64_t> out(n, 0);
    if (count == 0 || total == 0)
        return out;

    const std::size_t c = n - 1;
    if (eligible[c] && count > 1 && w[c] < floor) {
        double others = 0.0;
        for (std::size_t i = 0; i < c; ++i)
            others += w[i];
        for (std::size_t i = 0; i < c; ++i)
            w[i] = others > 0.0 ? w[i] * (1.0 - floor) / others : 0.0;
        w[c] = floor;
    }
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(sum > 0.0)) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = eligible[i] ? 1.0 : 0.0;
        sum = static_cast<double>(count);
    }

    std::vector<double> frac(n, 0.0);
    uint64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = static_cast<double>(total) * w[i] / sum;
        out[i] = static_cast<uint64_t>(std::floor(exact));
        frac[i] = exact - std::floor(exact);
        assigned += out[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % n)
        if (eligible[order[k]]) {
            ++out[order[k]];
            ++assigned;
        }
    // every eligible member runs at least one step, taken from the largest
    for (std::size_t i = 0; i < n; ++i)
        if (eligible[i] && out[i] == 0) {
            const auto big = std::max_element(out.begin(), out.end());
            if (*big > 1) {
                --*big;
                out[i] = 1;
            }
        }
    return out;
}

RenderResult render_pt(const Scene& scene, int spp, uint64_t seed) { return pt<true>(scene, spp, seed); }

namespace serial {
RenderResult render_pt(const Scene& scene, int spp, uint64_t seed) { return pt<false>(scene, spp, seed); }
ChainRun run_chains(const std::vector<ChainJob>& jobs, int width, int height) {
    return chains<false>(jobs, width, height);
}
}  // namespace serial

ChainRun run_chains(const std::vector<ChainJob>& jobs, int width, int height) {
    return chains<true>(jobs, width, height);
}

RenderResult run_mlt(const Scene& scene, const RenderConfig& config) {
    config.validate();
    const int w = scene.camera().width(), h = scene.camera().height();
    RenderResult result;
    result.image = ImageBuffer(w, h);

    auto t0 = Clock::now();
    const PrepassResult pre = run_prepass(scene, config.prepass_ppp, config.seed);
    result.seconds["prepass"] = seconds_since(t0);

    // one domain holding every record; b uses all of them
    Partition all;
    all.complementary = true;
    double mass = 0.0;
    for (const auto& [sig, buf] : pre.census) {
        all.signatures.push_back(sig);
        for (const PathRecord& r : buf.records) {
            all.reservoir.push_back({r.scalar, r.seed, r.pixel, r.emission, sig});
            mass += r.scalar;
        }
    }
    all.b = mass / static_cast<double>(pre.total_samples());
    all.P = 1.0;
    result.b = all.b;
    if (!(all.b > 0.0)) {
        spdlog::warn("pre-pass found no light; returning a black image");
        return result;
    }

    const int n = config.chains > 0 ? config.chains : config.K + 1;
    const uint64_t total = static_cast<uint64_t>(std::llround(config.mutations_per_pixel * w * h));
    std::vector<ChainJob> jobs;
    for (int c = 0; c < n; ++c) {
        ChainJob job;
        job.ctx.scene = &scene;
        job.ctx.large_step_probability = config.large_step_probability;
        job.ctx.large_step_attempts = config.large_step_attempts;
        job.ctx.lens = config.lens;
        job.partition = &all;
        job.stream = chain_stream(config.seed, kMltSalt, c);
        job.steps = total / n + (static_cast<uint64_t>(c) < total % n ? 1 : 0);
        job.burn_in = config.burn_in;
        job.scale = all.b * w * h * static_cast<double>(job.steps) / static_cast<double>(total);
        if (job.steps > 0)
            jobs.push_back(job);
    }

    t0 = Clock::now();
    ChainRun run = run_chains(jobs, w, h);
    result.seconds["chains"] = seconds_since(t0);
    result.image = std::move(run.image);
    for (std::size_t c = 0; c < jobs.size(); ++c)
        result.chains.push_back({0, "*", all.b, 1.0, jobs[c].steps, run.stats[c]});
    return result;
}

RenderResult run_partitioned(const Scene& scene, const RenderConfig& config) {
    config.validate();
    const int w = scene.camera().width(), h = scene.camera().height();
    RenderResult result;
    result.image = ImageBuffer(w, h);

    auto t0 = Clock::now();
    const PrepassResult pre = run_prepass(scene, config.prepass_ppp, config.seed);
    result.seconds["prepass"] = seconds_since(t0);

    t0 = Clock::now();
    SelectionLimits limits{config.memory_cap_bytes, w, h};
    result.partitions = build_partitions(pre, config.K, limits);
    const PartitionSet& set = result.partitions;
    for (const Partition& p : set.partitions)
        result.b += p.b;
    result.seconds["partition"] = seconds_since(t0);
    if (!(result.b > 0.0)) {
        spdlog::warn("pre-pass found no light; returning a black image");
        return result;
    }

    t0 = Clock::now();
    const OffsetSet offsets = config.kernel == KernelKind::sparse ? build_offsets(config.y_size, config.radius)
                                                                   : build_full_offsets(config.radius);
    const int n = static_cast<int>(set.partitions.size());
    result.guidance.resize(n);
    for (int i = 0; i < n; ++i) {
        std::vector<const PartitionBuffer*> bufs;
        for (const Signature& s : set.partitions[i].signatures)
            bufs.push_back(&pre.census.at(s));
        result.guidance[i] =
            build_guidance(splat_records(bufs, w, h, pre.paths_per_pixel), pre.gbuffer, i, config.epsilon);
    }
    result.seconds["guidance"] = seconds_since(t0);

    const uint64_t total = static_cast<uint64_t>(std::llround(config.mutations_per_pixel * w * h));
    const std::vector<uint64_t> budget = allocate_budget(set, total, config.complementary_floor);
    std::vector<ChainJob> jobs;
    for (int i = 0; i < n; ++i) {
        if (budget[i] == 0)
            continue;
        ChainJob job;
        job.ctx.scene = &scene;
        job.ctx.partitions = &set;
        job.ctx.partition = i;
        if (config.guided) {
            job.ctx.guidance = &result.guidance[i];
            job.ctx.gbuffer = &pre.gbuffer;
            job.ctx.offsets = &offsets;
        }
        job.ctx.large_step_probability = config.large_step_probability;
        job.ctx.large_step_attempts = config.large_step_attempts;
        job.ctx.lens = config.lens;
        job.partition = &set.partitions[i];
        job.stream = chain_stream(config.seed, kPartitionSalt, i);
        job.steps = budget[i];
        job.burn_in = config.burn_in;
        job.scale = set.partitions[i].b * w * h;
        jobs.push_back(job);
    }

    t0 = Clock::now();
    ChainRun run = run_chains(jobs, w, h);
    result.seconds["chains"] = seconds_since(t0);
    result.image = std::move(run.image);
    for (std::size_t c = 0; c < jobs.size(); ++c) {
        const Partition& p = *jobs[c].partition;
        result.chains.push_back({p.id, p.complementary ? "complement" : joined(p.signatures), p.b, p.P,
                                 jobs[c].steps, run.stats[c]});
    }
    return result;
}

RenderResult render(const Scene& scene, const RenderConfig& config) {
    switch (config.algorithm) {
    case Algorithm::pt: return render_pt(scene, config.spp, config.seed);
    case Algorithm::mlt: return run_mlt(scene, config);
    case Algorithm::partitioned: return run_partitioned(scene, config);
    }
    throw std::invalid_argument("render: unknown algorithm");
}

}  // namespace partmc
