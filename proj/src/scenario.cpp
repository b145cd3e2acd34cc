#include "fpimpulse/scenario.hpp"

#include <cmath>
#include <string>

#include "fpimpulse/errors.hpp"

namespace fpimpulse {

void HabitatParams::validate(const char* field_prefix) const {
    const std::string pfx = field_prefix;
    growth.validate((pfx + ".growth").c_str());
    if (!(mortality > 0.0) || !std::isfinite(mortality))
        throw ConfigError(pfx + ".mortality: must be > 0");
}

void ImpulseSchedule::validate(double dt, const char* field_prefix) const {
    const std::string pfx = field_prefix;
    if (!(horizon > 0.0)) throw ConfigError(pfx + ".horizon: must be > 0");
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double tau = times[j];
        if (!(tau > 0.0) || !(tau < horizon))
            throw ConfigError(pfx + ".times: each time must lie strictly inside (0, horizon)");
        if (j > 0 && !(tau > times[j - 1]))
            throw ConfigError(pfx + ".times: must be strictly increasing");
        if (dt > 0.0) {
            const double snapped = std::round(tau / dt) * dt;
            if (std::abs(snapped - tau) > 0.5 * dt)
                throw ConfigError(pfx + ".times: must sit within half a time step of a step boundary");
        }
    }
}

ControlPolicy ControlPolicy::zeros(InfoMode mode, std::size_t n_impulses,
                                   const Grid2D& grid, double cap) {
    ControlPolicy p;
    p.mode = mode;
    p.cap = cap;
    const std::size_t sz = mode == InfoMode::PartialInfo ? grid.n_w : grid.n_w * grid.n_z;
    p.u.assign(n_impulses, std::vector<double>(sz, 0.0));
    return p;
}

void ControlPolicy::validate(const Grid2D& grid, std::size_t n_impulses) const {
    if (u.size() != n_impulses)
        throw PolicyError("policy: impulse count mismatch with the schedule");
    const std::size_t sz = mode == InfoMode::PartialInfo ? grid.n_w : grid.n_w * grid.n_z;
    for (const auto& uj : u) {
        if (uj.size() != sz) throw PolicyError("policy: control size mismatch with the grid");
        for (double v : uj)
            if (!(v >= -1e-12 && v <= cap + 1e-12))
                throw PolicyError("policy: control values must lie in [0, cap]");
    }
}

void Scenario::validate() const {
    grid.validate("scenario.grid");
    habitat1.validate("scenario.habitat1");
    habitat2.validate("scenario.habitat2");
    schedule.validate(dt, "scenario.schedule");
    if (!(dt > 0.0)) throw ConfigError("scenario.dt: must be > 0");
    if (!(cost_c >= 0.0)) throw ConfigError("scenario.cost_c: must be >= 0");
    if (!(cap_u > 0.0 && cap_u < 1.0))
        throw ConfigError("scenario.cap_u: must satisfy 0 < U < 1");
    if (!(window_lo >= 0.0 && window_lo < window_hi && window_hi <= grid.w_max))
        throw ConfigError("scenario.target_window: must satisfy 0 <= w_lo < w_hi <= w_max");
    if (!(init.total > 0.0)) throw ConfigError("scenario.init.total: must be > 0");
    if (!(init.amplitude_a > 0.0)) throw ConfigError("scenario.init.amplitude_a: must be > 0");
    if (!std::isfinite(init.w_center) || !std::isfinite(init.z_center))
        throw ConfigError("scenario.init: hump centre must be finite");
}

Scenario Scenario::baseline(double r1, double r2) {
    Scenario s;
    s.habitat1.growth.r = r1;
    s.habitat2.growth.r = r2;
    s.schedule.times = {10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
    s.schedule.horizon = 70.0;
    s.window_lo = 0.3 * s.grid.w_max;
    s.window_hi = 0.7 * s.grid.w_max;
    return s;
}

Field2D initial_population(const Scenario& scenario) {
    const Grid2D& g = scenario.grid;
    const InitHump& h = scenario.init;
    Field2D y(g);
    for (std::size_t i = 0; i < g.n_w; ++i) {
        const double rw = (g.w(i) - h.w_center) / h.w_center;
        for (std::size_t j = 0; j < g.n_z; ++j) {
            const double dz = g.z(j) - h.z_center;
            y.at(i, j) = std::exp(-h.amplitude_a * (rw * rw + dz * dz));
        }
    }
    const double mass = integrate(y);
    const double scale = h.total / mass;
    for (double& v : y.v) v *= scale;
    return y;
}

} // namespace fpimpulse
