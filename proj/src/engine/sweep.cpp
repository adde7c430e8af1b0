#include "partmc/engine/sweep.h"

#include <stdexcept>

#include <spdlog/spdlog.h>

namespace partmc {

double structured_noise(const ImageBuffer& image, const ImageBuffer& reference, int tile) {
    if (image.width() != reference.width() || image.height() != reference.height())
        throw std::invalid_argument("structured_noise: image sizes differ");
    if (tile < 1)
        throw std::invalid_argument("structured_noise: tile must be positive");
    std::vector<double> variances;
    for (int ty = 0; ty + tile <= image.height(); ty += tile)
        for (int tx = 0; tx + tile <= image.width(); tx += tile) {
            double s = 0.0, s2 = 0.0;
            for (int y = ty; y < ty + tile; ++y)
                for (int x = tx; x < tx + tile; ++x) {
                    const double e = scalar_contribution(image.at(x, y)) - scalar_contribution(reference.at(x, y));
                    s += e;
                    s2 += e * e;
                }
            const double n = static_cast<double>(tile) * tile;
            variances.push_back(std::max(0.0, s2 / n - (s / n) * (s / n)));
        }
    if (variances.empty())
        return 0.0;
    double m = 0.0, m2 = 0.0;
    for (double v : variances) {
        m += v;
        m2 += v * v;
    }
    m /= static_cast<double>(variances.size());
    return std::max(0.0, m2 / static_cast<double>(variances.size()) - m * m);
}

std::vector<SweepCell> run_sweep(const Scene& scene, const ImageBuffer& reference, const SweepConfig& config) {
    if (config.seeds.empty())
        throw std::invalid_argument("sweep: no seeds");
    std::vector<SweepCell> cells;
    for (int y : config.y_sizes)
        for (double r : config.radii) {
            SweepCell cell{y, r, 0.0, 0.0};
            for (uint64_t seed : config.seeds) {
                RenderConfig rc = config.base;
                rc.algorithm = Algorithm::partitioned;
                rc.y_size = y;
                rc.radius = r;
                rc.seed = seed;
                const RenderResult res = run_partitioned(scene, rc);
                cell.rmse += rmse(res.image, reference);
                cell.structured_noise += structured_noise(res.image, reference);
            }
            cell.rmse /= static_cast<double>(config.seeds.size());
            cell.structured_noise /= static_cast<double>(config.seeds.size());
            spdlog::info("sweep |Y'|={} R={}: rmse {:.6g}, structured noise {:.6g}", y, r, cell.rmse,
                         cell.structured_noise);
            cells.push_back(cell);
        }
    return cells;
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
    out << "y_size,radius,rmse,structured_noise\n";
    for (const SweepCell& c : cells)
        out << c.y_size << ',' << c.radius << ',' << c.rmse << ',' << c.structured_noise << '\n';
}

}  // namespace partmc
