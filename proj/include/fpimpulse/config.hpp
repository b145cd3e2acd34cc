#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpimpulse/calibrate.hpp"
#include "fpimpulse/growth.hpp"
#include "fpimpulse/scenario.hpp"

namespace fpimpulse {

// Settings of the `simulate` command.
struct SimulateConfig {
    GrowthParams params;                  // Hii-River 2019 defaults
    ModelKind kind = ModelKind::Proposed;
    std::vector<double> sample_times = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    double dt = 0.004;
    std::size_t n_paths = 1000000;
    // Histogram bin width for the artifact histogram (10 g bins up to 130,
    // then unbounded).
    double bin_width = 10.0;
    double bin_max = 130.0;
};

// Settings of the `calibrate` command.
struct CalibrateConfig {
    std::string histogram_csv;  // optional; enables the histogram fit
    std::string historical_csv; // optional; enables the growth-rate fit
    double obs_day = 90.0;
    double x0 = 6.0;
    SearchBox box;
    std::vector<double> r_grid = {0.041, 0.042, 0.043, 0.044, 0.045, 0.046,
                                  0.047, 0.048, 0.049, 0.050, 0.051};
    GrowthParams rate_base; // base parameters for the growth-rate fit
    std::size_t n_paths_search = 100000;
    std::size_t n_paths_final = 1000000;
    double mc_dt = 0.004;
};

// Fully validated run configuration. Omitted numerics fall back to the
// reference scenario defaults (dt = 0.01, 201x201 grid, w_max = 5.3,
// U = c = 0.2, T = 70, impulses every 10 days, window (0.3, 0.7) w_max,
// R = 0.01).
struct RunConfig {
    std::string command; // simulate | calibrate | optimize | sweep | plot
    std::uint64_t seed = 1;
    Scenario scenario = Scenario::baseline(0.051, 0.048);
    bool scenario_given = false;
    InfoMode mode = InfoMode::PartialInfo;
    std::size_t max_iters = 50;
    std::vector<double> sweep_costs = {0.1, 0.2, 0.3, 0.4, 0.5,
                                       0.6, 0.7, 0.8, 0.9, 1.0};
    std::size_t record_every = 100;
    SimulateConfig simulate;
    CalibrateConfig calibrate;
};

// Parses and validates a JSON configuration file. Violations are reported
// with their field path. Unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& json_text, const std::string& origin);

// Canonical JSON serialization; load(parse(serialize(c))) == c.
std::string serialize_config(const RunConfig& config);

bool config_equal(const RunConfig& a, const RunConfig& b);

} // namespace fpimpulse
