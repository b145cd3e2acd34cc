#pragma once

#include <cstddef>
#include <vector>

#include "fpimpulse/field.hpp"
#include "fpimpulse/growth.hpp"

namespace fpimpulse {

// Growth law plus mortality for one habitat's population dynamics.
struct HabitatParams {
    GrowthParams growth;
    double mortality = 0.01; // R, 1/day

    void validate(const char* field_prefix = "habitat") const;

    // FPE coefficients of the latent direction (proposed model).
    double advection_z(double z) const { return growth.d_relax * (1.0 - z); }
    double half_c2(double z) const {
        const double s = growth.sigma;
        return 0.5 * s * s * z * (1.0 - z);
    }
};

// Transport is allowed only at tau_1 < ... < tau_J, all inside (0, T).
struct ImpulseSchedule {
    std::vector<double> times;
    double horizon = 70.0;

    std::size_t count() const { return times.size(); }
    void validate(double dt, const char* field_prefix = "schedule") const;
};

enum class InfoMode { FullInfo, PartialInfo };

// Per-impulse transport fractions valued in [0, cap]. Full-information
// controls vary over (w, z); partial-information controls vary over w only
// and broadcast along z.
struct ControlPolicy {
    InfoMode mode = InfoMode::PartialInfo;
    double cap = 0.2;
    std::vector<std::vector<double>> u; // [impulse][n_w] or [impulse][n_w*n_z]

    static ControlPolicy zeros(InfoMode mode, std::size_t n_impulses,
                               const Grid2D& grid, double cap);

    double value(std::size_t j, std::size_t iw, std::size_t iz,
                 const Grid2D& grid) const {
        return mode == InfoMode::PartialInfo ? u[j][iw] : u[j][iw * grid.n_z + iz];
    }

    void validate(const Grid2D& grid, std::size_t n_impulses) const;
};

// Gaussian-hump initial population, normalized to the given total mass.
struct InitHump {
    double amplitude_a = 500.0;
    double w_center = 0.1;
    double z_center = 0.1;
    double total = 6e6; // g
};

// Complete two-habitat transport problem definition.
struct Scenario {
    HabitatParams habitat1, habitat2;
    ImpulseSchedule schedule;
    double cost_c = 0.2;     // per-unit transport cost
    double cap_u = 0.2;      // U
    double window_lo = 0.0;  // omega = (window_lo, window_hi) in log-weight
    double window_hi = 0.0;
    InitHump init;
    Grid2D grid;
    double dt = 0.01;

    void validate() const;

    // Reference configuration: 201x201 grid on (0, 5.3) x (0, 1), T = 70,
    // impulses every 10 days, omega = (0.3, 0.7) w_max, U = c = 0.2,
    // D = 0.019, sigma = 0.051, R = 0.01, hump a = 500 at (0.1, 0.1) with
    // total 6e6 g. Growth rates differ per habitat.
    static Scenario baseline(double r1, double r2);
};

// Gaussian initial hump for habitat 1 (habitat 2 starts empty).
Field2D initial_population(const Scenario& scenario);

} // namespace fpimpulse
