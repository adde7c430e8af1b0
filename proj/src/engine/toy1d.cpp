#include "partmc/engine/toy1d.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "partmc/core/math.h"
#include "partmc/core/random.h"

namespace partmc {

namespace {

struct Region {
    double lo, hi;
};

double normal(RandomStream& rng) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

bool inside(const Region& r, double x) { return x >= r.lo && x <= r.hi; }

// Adds the chain's histogram estimate (b / n per step, per unit length) to `hist`.
void run_chain(const Region& r, double b, int steps, const std::vector<double>& xs, const std::vector<double>& fs,
               const Toy1dConfig& cfg, RandomStream rng, std::vector<double>& hist) {
    // resample the start from the pre-pass samples of the region, proportional to f
    double mass = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (inside(r, xs[k]))
            mass += fs[k];
    if (!(mass > 0.0) || steps <= 0)
        return;
    double target = rng.uniform() * mass, x = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (inside(r, xs[k])) {
            x = xs[k];
            target -= fs[k];
            if (target < 0.0)
                break;
        }
    double fx = toy1d_target(x);

    const double width = 1.0 / cfg.bins;
    const double splat = b / steps / width;
    for (int i = -cfg.burn_in; i < steps; ++i) {
        const double y = x + cfg.sigma * normal(rng);
        const double u = rng.uniform();
        if (inside(r, y)) {
            const double fy = toy1d_target(y);
            if (u * fx < fy) {
                x = y;
                fx = fy;
            }
        }
        if (i >= 0)
            hist[std::min(cfg.bins - 1, static_cast<int>(x * cfg.bins))] += splat;
    }
}

std::vector<Region> regions_for(double boundary) {
    if (boundary <= 0.0 || boundary >= 1.0)
        return {{0.0, 1.0}};
    return {{0.0, boundary}, {std::nextafter(boundary, 2.0), 1.0}};
}

// One repetition of one estimator: returns the histogram density estimate.
std::vector<double> repetition(const std::vector<Region>& regions, int rep, const Toy1dConfig& cfg) {
    RandomStream pre(cfg.seed, static_cast<uint64_t>(rep) * 8);
    std::vector<double> xs(cfg.prepass), fs(cfg.prepass);
    for (int k = 0; k < cfg.prepass; ++k) {
        xs[k] = (k + pre.uniform()) / cfg.prepass;
        fs[k] = toy1d_target(xs[k]);
    }
    std::vector<double> hist(cfg.bins, 0.0);
    const int n = static_cast<int>(regions.size());
    for (int i = 0; i < n; ++i) {
        double b = 0.0;
        for (int k = 0; k < cfg.prepass; ++k)
            if (inside(regions[i], xs[k]))
                b += fs[k];
        b /= cfg.prepass;
        const int steps = cfg.samples / n + (i < cfg.samples % n ? 1 : 0);
        RandomStream rng(cfg.seed, static_cast<uint64_t>(rep) * 8 + 1 + 2 * n + i);
        run_chain(regions[i], b, steps, xs, fs, cfg, rng, hist);
    }
    return hist;
}

}  // namespace

double toy1d_target(double x) {
    if (x < 0.0 || x > 1.0)
        return 0.0;
    if (x <= 0.8)
        return 0.05 + 0.03 * std::sin(6.0 * kPi * x);
    const double d = x - 0.9;
    return 8.0 * std::exp(-200.0 * d * d) + 0.05;
}

double toy1d_quadrature(double lo, double hi, long n) {
    if (!(hi > lo))
        return 0.0;
    const double h = (hi - lo) / static_cast<double>(n);
    double sum = 0.0, comp = 0.0;  // Kahan summation over 1e7 terms
    for (long i = 0; i < n; ++i) {
        const double y = toy1d_target(lo + (static_cast<double>(i) + 0.5) * h) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum * h;
}

Toy1dReport run_toy1d(const Toy1dConfig& cfg) {
    if (cfg.reps < 2 || cfg.samples < 1 || cfg.prepass < 1 || cfg.bins < 1 || !(cfg.sigma > 0.0))
        throw std::invalid_argument("toy1d: need reps >= 2 and positive samples, pre-pass, bins and sigma");
    const std::vector<Region> estimators[2] = {regions_for(1.0), regions_for(cfg.boundary)};

    const int nb = cfg.bins;
    std::vector<std::vector<double>> hists[2];
    for (int e = 0; e < 2; ++e)
        for (int rep = 0; rep < cfg.reps; ++rep)
            hists[e].push_back(repetition(estimators[e], rep, cfg));

    Toy1dReport report;
    report.bins.resize(nb);
    const double width = 1.0 / nb;
    for (int j = 0; j < nb; ++j) {
        Toy1dBin& bin = report.bins[j];
        bin.x = (j + 0.5) * width;
        bin.f = toy1d_target(bin.x);
        for (int e = 0; e < 2; ++e) {
            double s = 0.0, s2 = 0.0;
            for (const auto& h : hists[e]) {
                s += h[j];
                s2 += h[j] * h[j];
            }
            bin.mean[e] = s / cfg.reps;
            bin.variance[e] = std::max(0.0, (s2 - cfg.reps * bin.mean[e] * bin.mean[e]) / (cfg.reps - 1));
        }
    }

    const double split = std::clamp(cfg.boundary, 0.0, 1.0);
    report.low = {0.0, split};
    report.high = {split, 1.0};
    for (Toy1dRegion* r : {&report.low, &report.high}) {
        r->truth = toy1d_quadrature(r->lo, r->hi);
        int count = 0;
        std::vector<int> in_region;
        for (int j = 0; j < nb; ++j)
            if (report.bins[j].x > r->lo && report.bins[j].x < r->hi) {
                in_region.push_back(j);
                ++count;
            }
        for (int e = 0; e < 2; ++e) {
            double s = 0.0, s2 = 0.0, v = 0.0;
            for (const auto& h : hists[e]) {
                double est = 0.0;
                for (int j : in_region)
                    est += h[j] * width;
                s += est;
                s2 += est * est;
            }
            for (int j : in_region)
                v += report.bins[j].variance[e];
            r->mean[e] = s / cfg.reps;
            const double var = std::max(0.0, (s2 - cfg.reps * r->mean[e] * r->mean[e]) / (cfg.reps - 1));
            r->se[e] = std::sqrt(var / cfg.reps);
            r->bin_variance[e] = count > 0 ? v / count : 0.0;
        }
    }
    return report;
}

void write_toy1d_csv(const Toy1dReport& report, std::ostream& out) {
    out << "x,f,mean_unpartitioned,mean_partitioned,var_unpartitioned,var_partitioned\n";
    for (const Toy1dBin& b : report.bins)
        out << b.x << ',' << b.f << ',' << b.mean[0] << ',' << b.mean[1] << ',' << b.variance[0] << ','
            << b.variance[1] << '\n';
}

}  // namespace partmc
