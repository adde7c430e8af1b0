// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "partmc/engine/render.h"
#include "partmc/guidance/denoise.h"
#include "partmc/path/prepass.h"
#include "partmc/scene/scene_io.h"

using namespace partmc;

namespace {

const Scene& scene() {
    static const Scene s = builtin_scene("cornell-caustic", {64, 64, 1.0});
    return s;
}

const PrepassResult& prepass() {
    static const PrepassResult p = run_prepass(scene(), 4, 1);
    return p;
}

std::vector<ChainJob> chain_jobs(const PartitionSet& set) {
    std::vector<ChainJob> jobs;
    for (std::size_t i = 0; i < set.partitions.size(); ++i) {
        if (!(set.partitions[i].b > 0.0))
            continue;
        ChainJob job;
        job.ctx.scene = &scene();
        job.ctx.partitions = &set;
        job.ctx.partition = static_cast<int>(i);
        job.partition = &set.partitions[i];
        job.stream = RandomStream(1, 0).split(i);
        job.steps = 4096;
        job.burn_in = 64;
        job.scale = set.partitions[i].b;
        jobs.push_back(job);
    }
    return jobs;
}

template <bool Parallel>
void BM_prepass(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? run_prepass(scene(), 4, 1) : serial::run_prepass(scene(), 4, 1));
}

template <bool Parallel>
void BM_path_tracing(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? render_pt(scene(), 4, 1) : serial::render_pt(scene(), 4, 1));
}

template <bool Parallel>
void BM_denoise(benchmark::State& st) {
    const ImageBuffer noisy = render_pt(scene(), 1, 3).image;
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? atrous_denoise(noisy, prepass().gbuffer)
                                          : serial::atrous_denoise(noisy, prepass().gbuffer));
}

template <bool Parallel>
void BM_chains(benchmark::State& st) {
    static const PartitionSet set = build_partitions(prepass(), 10);
    const std::vector<ChainJob> jobs = chain_jobs(set);
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? run_chains(jobs, 64, 64) : serial::run_chains(jobs, 64, 64));
}

}  // namespace

BENCHMARK(BM_prepass<false>)->Name("prepass/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_prepass<true>)->Name("prepass/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_path_tracing<false>)->Name("path_tracing/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_path_tracing<true>)->Name("path_tracing/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_denoise<false>)->Name("denoise/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_denoise<true>)->Name("denoise/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_chains<false>)->Name("chains/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_chains<true>)->Name("chains/openmp")->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::warn);
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
