#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fpimpulse/growth.hpp"

namespace fpimpulse {

// Binned body-weight observations. The final bin may be unbounded above
// (bin_hi NaN); its midpoint fallback is lower edge + 5 g.
struct HistogramData {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi; // NaN marks an unbounded bin
    std::vector<std::uint64_t> counts;
    SampleStats observed_stats;

    std::uint64_t total_count() const;
    // Mean/std/skewness of the midpoint-expanded sample.
    SampleStats stats_from_midpoints() const;
    void validate() const;

    // CSV rows "bin_lo,bin_hi,count"; empty bin_hi marks the unbounded bin.
    // observed_stats is filled from the midpoints.
    static HistogramData from_csv(const std::string& path);
    // Raw observation list: stats computed directly, bins on 10 g edges up
    // to [130, inf).
    static HistogramData from_raw_weights(const std::vector<double>& weights);
};

// Daily (time, body weight) observations.
struct HistoricalData {
    std::vector<std::pair<double, double>> observations; // (day, g)

    void validate() const;
    // CSV rows "day,weight_g".
    static HistoricalData from_csv(const std::string& path);
};

// Monte-Carlo evaluation settings shared by the identification drivers.
struct McConfig {
    std::size_t n_paths = 100000;
    double dt = 0.004;
    std::uint64_t seed = 1;
};

// Sum of the relative errors of average, standard deviation and skewness.
double perf_measure_p(const SampleStats& obs, const SampleStats& model);

// Mean squared residual of the model mean curve against the observations.
double err_measure(const HistoricalData& data,
                   const std::function<double(double)>& mean_curve);

// Axis-aligned search region for (r, D, sigma, z0); degenerate ranges pin an
// axis. A coarse pass on an n-per-axis grid is followed by one refinement
// pass on a 5x finer grid around the incumbent.
struct SearchBox {
    std::array<double, 2> r{0.03, 0.07};
    std::array<double, 2> d_relax{0.01, 0.03};
    std::array<double, 2> sigma{0.02, 0.08};
    std::array<double, 2> z0{0.01, 0.05};
    std::size_t n_per_axis = 5;
    bool refine = true;
};

struct HistogramFit {
    GrowthParams params;
    double achieved_p = 0.0;
    GrowthParams coarse_params; // incumbent after the coarse pass
    double coarse_p = 0.0;
    std::size_t evaluations = 0;
};

// Grid search with fixed-seed Monte-Carlo evaluation of the performance
// measure at the observation day.
HistogramFit identify_from_histogram(const HistogramData& obs,
                                     const SearchBox& box, const McConfig& mc,
                                     double obs_day, double x0 = 6.0);

struct RateFit {
    double r_star = 0.0;
    double err_star = 0.0;
    std::vector<std::pair<double, double>> err_table; // (r, Err)
};

// argmin over the candidate growth rates of the mean-curve residual, with
// the full error table.
RateFit identify_growth_rate(const HistoricalData& data, const GrowthParams& base,
                             const std::vector<double>& r_grid, const McConfig& mc);

} // namespace fpimpulse
