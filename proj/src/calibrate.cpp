#include "fpimpulse/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "fpimpulse/errors.hpp"

namespace fpimpulse {

namespace {

SampleStats stats_of(const std::vector<double>& x, const std::vector<double>& weight) {
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        wsum += weight[i];
        mean += weight[i] * x[i];
    }
    if (wsum <= 0.0) throw ConfigError("histogram: total count must be positive");
    mean /= wsum;
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean;
        m2 += weight[i] * d * d;
        m3 += weight[i] * d * d * d;
    }
    m2 /= wsum;
    m3 /= wsum;
    SampleStats s;
    s.average = mean;
    s.std_dev = std::sqrt(m2);
    s.skewness = m2 > 0.0 ? m3 / (m2 * std::sqrt(m2)) : 0.0;
    return s;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (ss.eof() && !line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 1 || hi <= lo) return {0.5 * (lo + hi)};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

} // namespace

std::uint64_t HistogramData::total_count() const {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

void HistogramData::validate() const {
    if (bin_lo.empty() || bin_lo.size() != counts.size() || bin_hi.size() != counts.size())
        throw ConfigError("histogram: edge/count arrays must be nonempty and equal-sized");
    for (std::size_t i = 0; i < bin_lo.size(); ++i) {
        if (!std::isnan(bin_hi[i]) && !(bin_hi[i] > bin_lo[i]))
            throw ConfigError("histogram: bin edges must be increasing");
        if (i > 0 && !(bin_lo[i] > bin_lo[i - 1]))
            throw ConfigError("histogram: bin edges must be increasing");
        if (std::isnan(bin_hi[i]) && i + 1 != bin_lo.size())
            throw ConfigError("histogram: only the final bin may be unbounded");
    }
    if (total_count() == 0) throw ConfigError("histogram: total count must be positive");
}

SampleStats HistogramData::stats_from_midpoints() const {
    std::vector<double> mids(bin_lo.size()), weights(bin_lo.size());
    for (std::size_t i = 0; i < bin_lo.size(); ++i) {
        mids[i] = std::isnan(bin_hi[i]) ? bin_lo[i] + 5.0
                                        : 0.5 * (bin_lo[i] + bin_hi[i]);
        weights[i] = static_cast<double>(counts[i]);
    }
    return stats_of(mids, weights);
}

HistogramData HistogramData::from_csv(const std::string& path) {
    HistogramData h;
    for (const auto& row : read_csv_rows(path)) {
        if (row.size() != 3) throw IoError(path + ": expected rows bin_lo,bin_hi,count");
        if (!is_number(row[0])) continue; // header
        h.bin_lo.push_back(std::stod(row[0]));
        h.bin_hi.push_back(row[1].empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : std::stod(row[1]));
        h.counts.push_back(static_cast<std::uint64_t>(std::stoull(row[2])));
    }
    h.validate();
    h.observed_stats = h.stats_from_midpoints();
    return h;
}

HistogramData HistogramData::from_raw_weights(const std::vector<double>& weights) {
    if (weights.empty()) throw ConfigError("histogram: raw weight list is empty");
    HistogramData h;
    for (double lo = 0.0; lo < 130.0; lo += 10.0) {
        h.bin_lo.push_back(lo);
        h.bin_hi.push_back(lo + 10.0);
        h.counts.push_back(0);
    }
    h.bin_lo.push_back(130.0);
    h.bin_hi.push_back(std::numeric_limits<double>::quiet_NaN());
    h.counts.push_back(0);
    for (double w : weights) {
        auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(w / 10.0)));
        idx = std::min(idx, h.counts.size() - 1);
        ++h.counts[idx];
    }
    std::vector<double> ones(weights.size(), 1.0);
    h.observed_stats = stats_of(weights, ones);
    return h;
}

void HistoricalData::validate() const {
    if (observations.empty()) throw ConfigError("historical data: must be nonempty");
    for (const auto& [t, x] : observations) {
        if (!(t > 0.0 && t <= 200.0))
            throw ConfigError("historical data: times must lie in (0, 200]");
        if (!(x > 0.0)) throw ConfigError("historical data: weights must be positive");
    }
}

HistoricalData HistoricalData::from_csv(const std::string& path) {
    HistoricalData d;
    for (const auto& row : read_csv_rows(path)) {
        if (row.size() != 2) throw IoError(path + ": expected rows day,weight_g");
        if (!is_number(row[0])) continue; // header
        d.observations.emplace_back(std::stod(row[0]), std::stod(row[1]));
    }
    d.validate();
    return d;
}

double perf_measure_p(const SampleStats& obs, const SampleStats& model) {
    if (obs.average == 0.0 || obs.std_dev == 0.0 || obs.skewness == 0.0)
        throw ConfigError("performance measure: observed statistics must be nonzero");
    return std::abs(obs.average - model.average) / std::abs(obs.average) +
           std::abs(obs.std_dev - model.std_dev) / std::abs(obs.std_dev) +
           std::abs(obs.skewness - model.skewness) / std::abs(obs.skewness);
}

double err_measure(const HistoricalData& data,
                   const std::function<double(double)>& mean_curve) {
    data.validate();
    double sum = 0.0;
    for (const auto& [t, x] : data.observations) {
        const double d = mean_curve(t) - x;
        sum += d * d;
    }
    return sum / static_cast<double>(data.observations.size());
}

namespace {

double evaluate_p(const GrowthParams& params, const SampleStats& obs,
                  const McConfig& mc, double obs_day) {
    const PathEnsemble ens = simulate_paths(params, ModelKind::Proposed, {obs_day},
                                            mc.dt, mc.n_paths, mc.seed);
    return perf_measure_p(obs, stats_at(ens, 0));
}

} // namespace

HistogramFit identify_from_histogram(const HistogramData& obs, const SearchBox& box,
                                     const McConfig& mc, double obs_day, double x0) {
    obs.validate();
    if (!(obs_day > 0.0)) throw ConfigError("obs_day: must be > 0");
    if (box.n_per_axis < 1) throw ConfigError("search box: n_per_axis must be >= 1");

    auto axis_ok = [](const std::array<double, 2>& a) { return a[1] >= a[0]; };
    if (!axis_ok(box.r) || !axis_ok(box.d_relax) || !axis_ok(box.sigma) || !axis_ok(box.z0))
        throw ConfigError("search box: ranges must satisfy lo <= hi");

    const SampleStats target = obs.observed_stats;
    HistogramFit fit;
    fit.achieved_p = std::numeric_limits<double>::infinity();

    auto sweep = [&](const std::array<double, 2>& rr, const std::array<double, 2>& dd,
                     const std::array<double, 2>& ss, const std::array<double, 2>& zz,
                     std::size_t n) {
        GrowthParams best_params;
        double best_p = std::numeric_limits<double>::infinity();
        for (double r : linspace(rr[0], rr[1], n))
            for (double d : linspace(dd[0], dd[1], n))
                for (double s : linspace(ss[0], ss[1], n))
                    for (double z : linspace(zz[0], zz[1], n)) {
                        GrowthParams p{r, d, s, x0, z};
                        if (!(2.0 * d >= s * s) || !(z > 0.0 && z < 1.0)) continue;
                        const double pv = evaluate_p(p, target, mc, obs_day);
                        ++fit.evaluations;
                        if (pv < best_p) {
                            best_p = pv;
                            best_params = p;
                        }
                    }
        if (!std::isfinite(best_p))
            throw ConfigError("search box: no feasible candidate (2 D >= sigma^2 fails everywhere)");
        return std::make_pair(best_params, best_p);
    };

    auto [coarse, coarse_p] = sweep(box.r, box.d_relax, box.sigma, box.z0, box.n_per_axis);
    fit.coarse_params = coarse;
    fit.coarse_p = coarse_p;
    fit.params = coarse;
    fit.achieved_p = coarse_p;

    if (box.refine && box.n_per_axis > 1) {
        auto refined_axis = [&](const std::array<double, 2>& range,
                                double centre) -> std::array<double, 2> {
            const double step = (range[1] - range[0]) / double(box.n_per_axis - 1);
            const double fine = step / 5.0;
            return {std::max(range[0], centre - 2.0 * fine),
                    std::min(range[1], centre + 2.0 * fine)};
        };
        auto [refined, refined_p] =
            sweep(refined_axis(box.r, coarse.r), refined_axis(box.d_relax, coarse.d_relax),
                  refined_axis(box.sigma, coarse.sigma), refined_axis(box.z0, coarse.z0),
                  box.n_per_axis);
        if (refined_p < fit.achieved_p) {
            fit.params = refined;
            fit.achieved_p = refined_p;
        }
    }
    return fit;
}

RateFit identify_growth_rate(const HistoricalData& data, const GrowthParams& base,
                             const std::vector<double>& r_grid, const McConfig& mc) {
    data.validate();
    if (r_grid.empty()) throw ConfigError("r_grid: must be nonempty");

    // Distinct sorted observation times become the Monte-Carlo sample times.
    std::vector<double> times;
    for (const auto& [t, x] : data.observations) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    RateFit fit;
    fit.err_star = std::numeric_limits<double>::infinity();
    for (double r : r_grid) {
        GrowthParams p = base;
        p.r = r;
        p.validate("candidate");
        const PathEnsemble ens =
            simulate_paths(p, ModelKind::Proposed, times, mc.dt, mc.n_paths, mc.seed);
        const std::vector<double> means = mean_weight_curve(ens);
        auto curve = [&](double t) {
            const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
            return means[static_cast<std::size_t>(it - times.begin())];
        };
        const double err = err_measure(data, curve);
        fit.err_table.emplace_back(r, err);
        if (err < fit.err_star) {
            fit.err_star = err;
            fit.r_star = r;
        }
    }
    return fit;
}

} // namespace fpimpulse
