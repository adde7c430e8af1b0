#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

namespace partmc {

/// Test integrand on [0, 1]: a dim oscillating floor up to 0.8 and a narrow
/// bright bump after it.
double toy1d_target(double x);

struct Toy1dConfig {
    int reps = 100;
    int samples = 1000;      // chain steps per repetition, split evenly between partitions
    int prepass = 1000;      // stratified samples estimating the normalizations
    double boundary = 0.8;   // partition boundary; 0 or 1 leaves a single partition
    double sigma = 0.05;     // Gaussian proposal width
    int burn_in = 100;
    int bins = 100;
    uint64_t seed = 1;
};

struct Toy1dRegion {
    double lo = 0.0, hi = 0.0;
    double truth = 0.0;         // quadrature integral
    double mean[2] = {0, 0};    // [unpartitioned, partitioned] mean region estimate over repetitions
    double se[2] = {0, 0};      // standard error of those means
    double bin_variance[2] = {0, 0};  // mean over the region's bins of the across-repetition variance
    double variance_ratio() const { return bin_variance[1] > 0.0 ? bin_variance[0] / bin_variance[1] : 0.0; }
};

struct Toy1dBin {
    double x = 0.0, f = 0.0;
    double mean[2] = {0, 0};
    double variance[2] = {0, 0};
};

struct Toy1dReport {
    Toy1dRegion low, high;
    std::vector<Toy1dBin> bins;
};

/// Midpoint quadrature of the target over [lo, hi] with n points.
double toy1d_quadrature(double lo, double hi, long n = 10'000'000);

/// Metropolis estimates of the target's histogram, once with a single chain over
/// [0, 1] and once with one chain per side of the boundary, each normalized by
/// the pre-pass estimate of its own integral.
Toy1dReport run_toy1d(const Toy1dConfig& config);

/// CSV of the per-bin means and variances.
void write_toy1d_csv(const Toy1dReport& report, std::ostream& out);

}  // namespace partmc
