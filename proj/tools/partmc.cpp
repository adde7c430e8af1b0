// partmc: render, compare, sweep, toy1d and partition-report front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "partmc/engine/render.h"
#include "partmc/engine/sweep.h"
#include "partmc/engine/toy1d.h"
#include "partmc/path/prepass.h"
#include "partmc/scene/scene_io.h"

namespace fs = std::filesystem;
using namespace partmc;

namespace {

struct SceneArgs {
    std::string scene = "builtin:cornell-caustic";
    int width = 0;
    int height = 0;
    double emission_scale = 1.0;

    void add(CLI::App* cmd) {
        cmd->add_option("--scene", scene, "scene file or builtin:<name>")->capture_default_str();
        cmd->add_option("--width", width, "override image width");
        cmd->add_option("--height", height, "override image height");
        cmd->add_option("--res", [this](const CLI::results_t& r) {
               width = height = std::stoi(r[0]);
               return true;
           }, "override both image dimensions")
            ->type_name("INT");
        cmd->add_option("--emission-scale", emission_scale, "multiply every emitter")->capture_default_str();
    }

    Scene load() const {
        SceneOverrides o;
        if (width > 0)
            o.width = width;
        if (height > 0)
            o.height = height;
        o.emission_scale = emission_scale;
        return resolve_scene(scene, o);
    }
};

void add_render_options(CLI::App* cmd, RenderConfig& rc) {
    cmd->add_option("--mpp", rc.mutations_per_pixel, "mutations per pixel")->capture_default_str();
    cmd->add_option("--spp", rc.spp, "path tracing samples per pixel")->capture_default_str();
    cmd->add_option("--prepass-ppp", rc.prepass_ppp, "pre-pass paths per pixel")->capture_default_str();
    cmd->add_option("--K", rc.K, "partitions besides the complement")->capture_default_str();
    cmd->add_option("--chains", rc.chains, "plain MLT chains, 0 for K+1")->capture_default_str();
    cmd->add_option("--y-size", rc.y_size, "offsets per neighbourhood (odd)")->capture_default_str();
    cmd->add_option("--radius", rc.radius, "neighbourhood radius in pixels")->capture_default_str();
    cmd->add_option("--epsilon", rc.epsilon, "visibility surrogate floor")->capture_default_str();
    cmd->add_option("--kernel", rc.kernel, "offset kernel")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, KernelKind>{{"sparse", KernelKind::sparse}, {"full", KernelKind::full}}));
    cmd->add_option("--large-step", rc.large_step_probability, "large step probability")->capture_default_str();
    cmd->add_option("--burn-in", rc.burn_in, "burn-in mutations per chain")->capture_default_str();
    cmd->add_option("--seed", rc.seed, "render seed")->capture_default_str();
    cmd->add_flag("!--isotropic", rc.guided, "partitioned chains use isotropic lens moves");
}

void write_image(const ImageBuffer& image, const fs::path& out) {
    const std::string ext = out.extension().string();
    if (ext == ".ppm")
        write_ppm(image, out);
    else if (ext == ".pfm")
        write_pfm(image, out);
    else
        throw std::invalid_argument(fmt::format("unknown image extension '{}' (use .pfm or .ppm)", ext));
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    return out;
}

void dump_partitions(const RenderResult& res, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "partitions.csv");
        write_partition_report(res.partitions, out);
    }
    for (const GuidanceImage& g : res.guidance)
        write_pfm(g.D, dir / fmt::format("guidance_{}.pfm", g.partition));
    std::ofstream out = open_out(dir / "chains.csv");
    out << "partition,signatures,b,P,steps";
    for (const char* t : {"lens", "guided", "caustic", "large_step"})
        out << ',' << t << "_proposed," << t << "_accepted";
    out << '\n';
    for (const ChainReport& c : res.chains) {
        out << c.partition << ",\"" << c.signatures << "\"," << c.b << ',' << c.P << ',' << c.steps;
        for (int t = 0; t < kMutationTypes; ++t)
            out << ',' << c.stats.proposed[t] << ',' << c.stats.accepted[t];
        out << '\n';
    }
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof())
            throw std::invalid_argument(fmt::format("bad list entry '{}'", item));
        values.push_back(v);
    }
    if (values.empty())
        throw std::invalid_argument("empty list");
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partmc: partitioned, guided Metropolis light transport"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    // render
    CLI::App* render_cmd = app.add_subcommand("render", "render a scene to PFM or PPM");
    SceneArgs render_scene;
    RenderConfig rc;
    std::string algo = "partitioned";
    fs::path render_out = "out.pfm";
    fs::path dump_dir;
    render_scene.add(render_cmd);
    render_cmd->add_option("--algo", algo, "pt, mlt or partitioned")
        ->check(CLI::IsMember({"pt", "mlt", "partitioned"}))
        ->capture_default_str();
    add_render_options(render_cmd, rc);
    render_cmd->add_option("--out", render_out, "output image (.pfm or .ppm)")->capture_default_str();
    render_cmd->add_option("--dump-partitions", dump_dir, "directory for partition report and guidance images");

    // compare
    CLI::App* compare_cmd = app.add_subcommand("compare", "RMSE between two PFM images");
    fs::path cmp_a, cmp_b;
    compare_cmd->add_option("a", cmp_a)->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("b", cmp_b)->required()->check(CLI::ExistingFile);

    // sweep
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "RMSE over a |Y'| x radius grid");
    SceneArgs sweep_scene;
    RenderConfig sweep_rc;
    std::string y_sizes = "9,33,65,129", radii = "8,24,44,128", seeds = "1";
    fs::path sweep_ref, sweep_out;
    int ref_spp = 4096;
    sweep_scene.add(sweep_cmd);
    add_render_options(sweep_cmd, sweep_rc);
    sweep_cmd->add_option("--y-sizes", y_sizes, "comma-separated |Y'| values")->capture_default_str();
    sweep_cmd->add_option("--radii", radii, "comma-separated radii")->capture_default_str();
    sweep_cmd->add_option("--seeds", seeds, "comma-separated seeds averaged per cell")->capture_default_str();
    sweep_cmd->add_option("--reference", sweep_ref, "reference PFM; rendered with path tracing if absent");
    sweep_cmd->add_option("--reference-spp", ref_spp, "samples per pixel of a rendered reference")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "CSV output, stdout if omitted");

    // toy1d
    CLI::App* toy_cmd = app.add_subcommand("toy1d", "1D partitioning demonstrator");
    Toy1dConfig toy;
    fs::path toy_out;
    toy_cmd->add_option("--reps", toy.reps)->capture_default_str();
    toy_cmd->add_option("--samples", toy.samples)->capture_default_str();
    toy_cmd->add_option("--boundary", toy.boundary)->capture_default_str();
    toy_cmd->add_option("--sigma", toy.sigma)->capture_default_str();
    toy_cmd->add_option("--seed", toy.seed)->capture_default_str();
    toy_cmd->add_option("--out", toy_out, "per-bin CSV, stdout if omitted");

    // partition-report
    CLI::App* report_cmd = app.add_subcommand("partition-report", "pre-pass census and partition table");
    SceneArgs report_scene;
    int report_K = 10, report_ppp = 16;
    uint64_t report_seed = 1;
    fs::path census_out, report_out;
    report_scene.add(report_cmd);
    report_cmd->add_option("--K", report_K)->capture_default_str();
    report_cmd->add_option("--prepass-ppp", report_ppp)->capture_default_str();
    report_cmd->add_option("--seed", report_seed)->capture_default_str();
    report_cmd->add_option("--census", census_out, "also write the signature census CSV");
    report_cmd->add_option("--out", report_out, "partition CSV, stdout if omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        spdlog::set_level(spdlog::level::from_str(log_level));

        if (*render_cmd) {
            rc.algorithm = algo == "pt" ? Algorithm::pt : algo == "mlt" ? Algorithm::mlt : Algorithm::partitioned;
            const Scene scene = render_scene.load();
            const RenderResult res = render(scene, rc);
            write_image(res.image, render_out);
            for (const auto& [phase, s] : res.seconds)
                spdlog::info("{}: {:.3f} s", phase, s);
            if (!dump_dir.empty()) {
                if (rc.algorithm != Algorithm::partitioned)
                    throw std::invalid_argument("--dump-partitions needs --algo partitioned");
                dump_partitions(res, dump_dir);
            }
            std::cout << fmt::format("wrote {} (b = {:.6g})\n", render_out.string(), res.b);
        } else if (*compare_cmd) {
            std::cout << fmt::format("{:.9g}\n", rmse(read_pfm(cmp_a), read_pfm(cmp_b)));
        } else if (*sweep_cmd) {
            const Scene scene = sweep_scene.load();
            SweepConfig sc;
            sc.y_sizes = parse_list<int>(y_sizes);
            sc.radii = parse_list<double>(radii);
            sc.seeds = parse_list<uint64_t>(seeds);
            sc.base = sweep_rc;
            const ImageBuffer reference =
                sweep_ref.empty() ? render_pt(scene, ref_spp, 0x5eed).image : read_pfm(sweep_ref);
            const auto cells = run_sweep(scene, reference, sc);
            if (sweep_out.empty()) {
                write_sweep_csv(cells, std::cout);
            } else {
                std::ofstream out = open_out(sweep_out);
                write_sweep_csv(cells, out);
            }
        } else if (*toy_cmd) {
            const Toy1dReport rep = run_toy1d(toy);
            if (toy_out.empty()) {
                write_toy1d_csv(rep, std::cout);
            } else {
                std::ofstream out = open_out(toy_out);
                write_toy1d_csv(rep, out);
            }
            for (const auto* r : {&rep.low, &rep.high})
                std::cerr << fmt::format(
                    "[{:.2f},{:.2f}] truth {:.6g} | unpartitioned {:.6g} +- {:.2g} | partitioned {:.6g} +- {:.2g} | "
                    "variance ratio {:.3g}\n",
                    r->lo, r->hi, r->truth, r->mean[0], r->se[0], r->mean[1], r->se[1], r->variance_ratio());
        } else if (*report_cmd) {
            const Scene scene = report_scene.load();
            const PrepassResult pre = run_prepass(scene, report_ppp, report_seed);
            const PartitionSet set =
                build_partitions(pre, report_K, SelectionLimits{std::size_t{512} << 20, pre.width, pre.height});
            if (!census_out.empty()) {
                std::ofstream out = open_out(census_out);
                write_census_csv(pre.census, out);
            }
            if (report_out.empty()) {
                write_partition_report(set, std::cout);
            } else {
                std::ofstream out = open_out(report_out);
                write_partition_report(set, out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
