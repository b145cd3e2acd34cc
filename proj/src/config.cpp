#include "fpimpulse/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fpimpulse/errors.hpp"
#include "json.hpp"

namespace fpimpulse {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& obj, const std::string& path, const char* key,
                      std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(path + "." + key, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::vector<double> get_array(const json& obj, const std::string& path,
                              const char* key, std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

GrowthParams parse_growth(const json& obj, const std::string& path,
                          const GrowthParams& defaults, bool require_r) {
    expect_keys(obj, path, {"r", "d_relax", "sigma", "x0", "z0", "mortality"});
    GrowthParams p = defaults;
    if (require_r && !obj.contains("r")) fail(path + ".r", "required");
    p.r = get_number(obj, path, "r", p.r);
    p.d_relax = get_number(obj, path, "d_relax", p.d_relax);
    p.sigma = get_number(obj, path, "sigma", p.sigma);
    p.x0 = get_number(obj, path, "x0", p.x0);
    p.z0 = get_number(obj, path, "z0", p.z0);
    return p;
}

HabitatParams parse_habitat(const json& obj, const std::string& path,
                            const HabitatParams& defaults) {
    HabitatParams h = defaults;
    h.growth = parse_growth(obj, path, defaults.growth, /*require_r=*/true);
    h.mortality = get_number(obj, path, "mortality", defaults.mortality);
    return h;
}

Scenario parse_scenario(const json& obj, const std::string& path) {
    expect_keys(obj, path,
                {"habitat1", "habitat2", "grid", "dt", "horizon", "impulse_times",
                 "cost_c", "cap_u", "target_window", "init"});
    if (!obj.contains("habitat1") || !obj.contains("habitat2"))
        fail(path, "habitat1 and habitat2 (with growth rates r) are required");

    Scenario s = Scenario::baseline(0.0, 0.0);
    s.habitat1 = parse_habitat(obj.at("habitat1"), path + ".habitat1", s.habitat1);
    s.habitat2 = parse_habitat(obj.at("habitat2"), path + ".habitat2", s.habitat2);

    if (obj.contains("grid")) {
        const auto& g = obj.at("grid");
        expect_keys(g, path + ".grid", {"n_w", "n_z", "w_max"});
        s.grid.n_w = get_count(g, path + ".grid", "n_w", s.grid.n_w);
        s.grid.n_z = get_count(g, path + ".grid", "n_z", s.grid.n_z);
        s.grid.w_max = get_number(g, path + ".grid", "w_max", s.grid.w_max);
    }
    s.dt = get_number(obj, path, "dt", s.dt);
    s.schedule.horizon = get_number(obj, path, "horizon", s.schedule.horizon);
    s.schedule.times = get_array(obj, path, "impulse_times", s.schedule.times);
    s.cost_c = get_number(obj, path, "cost_c", s.cost_c);
    s.cap_u = get_number(obj, path, "cap_u", s.cap_u);
    if (obj.contains("target_window")) {
        const auto w = get_array(obj, path, "target_window", {});
        if (w.size() != 2) fail(path + ".target_window", "expected [w_lo, w_hi]");
        s.window_lo = w[0];
        s.window_hi = w[1];
    } else {
        s.window_lo = 0.3 * s.grid.w_max;
        s.window_hi = 0.7 * s.grid.w_max;
    }
    if (obj.contains("init")) {
        const auto& h = obj.at("init");
        expect_keys(h, path + ".init", {"amplitude_a", "w_center", "z_center", "total"});
        s.init.amplitude_a = get_number(h, path + ".init", "amplitude_a", s.init.amplitude_a);
        s.init.w_center = get_number(h, path + ".init", "w_center", s.init.w_center);
        s.init.z_center = get_number(h, path + ".init", "z_center", s.init.z_center);
        s.init.total = get_number(h, path + ".init", "total", s.init.total);
    }
    s.validate();
    return s;
}

ModelKind parse_kind(const json& obj, const std::string& path) {
    if (!obj.contains("model")) return ModelKind::Proposed;
    const std::string kind = obj.at("model").get<std::string>();
    if (kind == "proposed") return ModelKind::Proposed;
    if (kind == "legacy") return ModelKind::Legacy;
    fail(path + ".model", "expected \"proposed\" or \"legacy\"");
}

SimulateConfig parse_simulate(const json& obj, const std::string& path) {
    expect_keys(obj, path,
                {"params", "model", "sample_times", "dt", "n_paths", "bin_width",
                 "bin_max"});
    SimulateConfig c;
    if (obj.contains("params"))
        c.params = parse_growth(obj.at("params"), path + ".params", c.params, false);
    c.kind = parse_kind(obj, path);
    c.sample_times = get_array(obj, path, "sample_times", c.sample_times);
    c.dt = get_number(obj, path, "dt", c.dt);
    c.n_paths = get_count(obj, path, "n_paths", c.n_paths);
    c.bin_width = get_number(obj, path, "bin_width", c.bin_width);
    c.bin_max = get_number(obj, path, "bin_max", c.bin_max);
    c.params.validate((path + ".params").c_str());
    if (!(c.dt > 0.0)) fail(path + ".dt", "must be > 0");
    if (c.n_paths < 1) fail(path + ".n_paths", "must be >= 1");
    if (c.sample_times.empty()) fail(path + ".sample_times", "must be nonempty");
    return c;
}

CalibrateConfig parse_calibrate(const json& obj, const std::string& path) {
    expect_keys(obj, path,
                {"histogram_csv", "historical_csv", "obs_day", "x0", "search_box",
                 "r_grid", "rate_base", "n_paths_search", "n_paths_final", "mc_dt"});
    CalibrateConfig c;
    if (obj.contains("histogram_csv"))
        c.histogram_csv = obj.at("histogram_csv").get<std::string>();
    if (obj.contains("historical_csv"))
        c.historical_csv = obj.at("historical_csv").get<std::string>();
    c.obs_day = get_number(obj, path, "obs_day", c.obs_day);
    c.x0 = get_number(obj, path, "x0", c.x0);
    if (obj.contains("search_box")) {
        const auto& b = obj.at("search_box");
        expect_keys(b, path + ".search_box",
                    {"r", "d_relax", "sigma", "z0", "n_per_axis", "refine"});
        auto range = [&](const char* key, std::array<double, 2> fallback) {
            if (!b.contains(key)) return fallback;
            const auto v = get_array(b, path + ".search_box", key, {});
            if (v.size() != 2 || !(v[0] <= v[1]))
                fail(path + ".search_box." + key, "expected [lo, hi] with lo <= hi");
            return std::array<double, 2>{v[0], v[1]};
        };
        c.box.r = range("r", c.box.r);
        c.box.d_relax = range("d_relax", c.box.d_relax);
        c.box.sigma = range("sigma", c.box.sigma);
        c.box.z0 = range("z0", c.box.z0);
        c.box.n_per_axis = get_count(b, path + ".search_box", "n_per_axis",
                                     c.box.n_per_axis);
        if (b.contains("refine")) c.box.refine = b.at("refine").get<bool>();
    }
    c.r_grid = get_array(obj, path, "r_grid", c.r_grid);
    if (obj.contains("rate_base"))
        c.rate_base = parse_growth(obj.at("rate_base"), path + ".rate_base",
                                   c.rate_base, false);
    c.n_paths_search = get_count(obj, path, "n_paths_search", c.n_paths_search);
    c.n_paths_final = get_count(obj, path, "n_paths_final", c.n_paths_final);
    c.mc_dt = get_number(obj, path, "mc_dt", c.mc_dt);
    if (!(c.obs_day > 0.0)) fail(path + ".obs_day", "must be > 0");
    if (!(c.mc_dt > 0.0)) fail(path + ".mc_dt", "must be > 0");
    return c;
}

json growth_to_json(const GrowthParams& p) {
    return json{{"r", p.r}, {"d_relax", p.d_relax}, {"sigma", p.sigma},
                {"x0", p.x0}, {"z0", p.z0}};
}

} // namespace

RunConfig parse_config_json(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": JSON parse error: " + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be a JSON object");
    expect_keys(root, origin,
                {"command", "seed", "scenario", "mode", "max_iters", "sweep_costs",
                 "record_every", "simulate", "calibrate"});

    RunConfig c;
    if (root.contains("command")) {
        c.command = root.at("command").get<std::string>();
        static const std::set<std::string> known{"simulate", "calibrate", "optimize",
                                                 "sweep", "plot"};
        if (!known.count(c.command))
            fail(origin + ".command",
                 "expected one of simulate|calibrate|optimize|sweep|plot");
    }
    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned())
            fail(origin + ".seed", "expected a nonnegative integer");
        c.seed = root.at("seed").get<std::uint64_t>();
    }
    if (root.contains("mode")) {
        const std::string m = root.at("mode").get<std::string>();
        if (m == "full")
            c.mode = InfoMode::FullInfo;
        else if (m == "partial")
            c.mode = InfoMode::PartialInfo;
        else
            fail(origin + ".mode", "expected \"full\" or \"partial\"");
    }
    c.max_iters = get_count(root, origin, "max_iters", c.max_iters);
    if (c.max_iters < 1) fail(origin + ".max_iters", "must be >= 1");
    c.sweep_costs = get_array(root, origin, "sweep_costs", c.sweep_costs);
    c.record_every = get_count(root, origin, "record_every", c.record_every);
    if (root.contains("scenario")) {
        c.scenario = parse_scenario(root.at("scenario"), origin + ".scenario");
        c.scenario_given = true;
    }
    if (root.contains("simulate"))
        c.simulate = parse_simulate(root.at("simulate"), origin + ".simulate");
    if (root.contains("calibrate"))
        c.calibrate = parse_calibrate(root.at("calibrate"), origin + ".calibrate");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    json root;
    if (!c.command.empty()) root["command"] = c.command;
    root["seed"] = c.seed;
    root["mode"] = c.mode == InfoMode::FullInfo ? "full" : "partial";
    root["max_iters"] = c.max_iters;
    root["sweep_costs"] = c.sweep_costs;
    root["record_every"] = c.record_every;

    if (c.scenario_given) {
        const Scenario& s = c.scenario;
        json sc;
        auto habitat = [](const HabitatParams& h) {
            json o = growth_to_json(h.growth);
            o["mortality"] = h.mortality;
            return o;
        };
        sc["habitat1"] = habitat(s.habitat1);
        sc["habitat2"] = habitat(s.habitat2);
        sc["grid"] = json{{"n_w", s.grid.n_w}, {"n_z", s.grid.n_z}, {"w_max", s.grid.w_max}};
        sc["dt"] = s.dt;
        sc["horizon"] = s.schedule.horizon;
        sc["impulse_times"] = s.schedule.times;
        sc["cost_c"] = s.cost_c;
        sc["cap_u"] = s.cap_u;
        sc["target_window"] = json::array({s.window_lo, s.window_hi});
        sc["init"] = json{{"amplitude_a", s.init.amplitude_a},
                          {"w_center", s.init.w_center},
                          {"z_center", s.init.z_center},
                          {"total", s.init.total}};
        root["scenario"] = sc;
    }

    json sim;
    sim["params"] = growth_to_json(c.simulate.params);
    sim["model"] = c.simulate.kind == ModelKind::Proposed ? "proposed" : "legacy";
    sim["sample_times"] = c.simulate.sample_times;
    sim["dt"] = c.simulate.dt;
    sim["n_paths"] = c.simulate.n_paths;
    sim["bin_width"] = c.simulate.bin_width;
    sim["bin_max"] = c.simulate.bin_max;
    root["simulate"] = sim;

    json cal;
    if (!c.calibrate.histogram_csv.empty()) cal["histogram_csv"] = c.calibrate.histogram_csv;
    if (!c.calibrate.historical_csv.empty())
        cal["historical_csv"] = c.calibrate.historical_csv;
    cal["obs_day"] = c.calibrate.obs_day;
    cal["x0"] = c.calibrate.x0;
    cal["search_box"] = json{{"r", c.calibrate.box.r},
                             {"d_relax", c.calibrate.box.d_relax},
                             {"sigma", c.calibrate.box.sigma},
                             {"z0", c.calibrate.box.z0},
                             {"n_per_axis", c.calibrate.box.n_per_axis},
                             {"refine", c.calibrate.box.refine}};
    cal["r_grid"] = c.calibrate.r_grid;
    cal["rate_base"] = growth_to_json(c.calibrate.rate_base);
    cal["n_paths_search"] = c.calibrate.n_paths_search;
    cal["n_paths_final"] = c.calibrate.n_paths_final;
    cal["mc_dt"] = c.calibrate.mc_dt;
    root["calibrate"] = cal;

    return root.dump(2) + "\n";
}

bool config_equal(const RunConfig& a, const RunConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

} // namespace fpimpulse
