#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpimpulse/errors.hpp"
#include "fpimpulse/growth.hpp"
#include "fpimpulse/rng.hpp"

using namespace fpimpulse;

namespace {

GrowthParams table_params() {
    GrowthParams p;
    p.r = 0.051;
    p.d_relax = 0.019;
    p.sigma = 0.051;
    p.x0 = 6.0;
    p.z0 = 0.02;
    return p;
}

// Closed-form deterministic limit: w(t) = w0 + r (1-z0)(1-e^{-Dt})/D,
// z(t) = 1 - (1-z0) e^{-Dt}.
double ode_w(const GrowthParams& p, double t) {
    return p.w0() + p.r * (1.0 - p.z0) * (1.0 - std::exp(-p.d_relax * t)) / p.d_relax;
}
double ode_z(const GrowthParams& p, double t) {
    return 1.0 - (1.0 - p.z0) * std::exp(-p.d_relax * t);
}

} // namespace

TEST_CASE("step_w drift") {
    GrowthParams p = table_params();
    CHECK(step_w(1.0, 1.0, 0.004, p) == doctest::Approx(1.0));
    CHECK(step_w(0.0, 0.0, 1.0, p) == doctest::Approx(0.051));
    CHECK(step_w(std::log(6.0), 0.5, 0.004, p) ==
          doctest::Approx(std::log(6.0) + 1.02e-4).epsilon(1e-12));
    // Never decreases for z in [0, 1].
    CHECK(step_w(2.0, 0.9, 0.5, p) >= 2.0);
}

TEST_CASE("step_z_bounded absorbing and deterministic limits") {
    GrowthParams p = table_params();
    // z = 1 is absorbing: drift and diffusion both vanish.
    for (double draw : {-3.0, 0.0, 0.5, 4.0})
        CHECK(step_z_bounded(1.0, 0.004, p, draw) == doctest::Approx(1.0));

    GrowthParams det = p;
    det.sigma = 0.0;
    CHECK(step_z_bounded(0.5, 0.004, det, 0.0) ==
          doctest::Approx(0.5 + 0.019 * 0.5 * 0.004).epsilon(1e-7));
}

TEST_CASE("step_z_bounded stays inside [0,1] for extreme draws") {
    GrowthParams p = table_params();
    for (double z : {1e-12, 1e-6, 0.02, 0.5, 0.999999, 1.0 - 1e-12}) {
        for (double draw : {-50.0, -8.0, -1.0, 0.0, 1.0, 8.0, 50.0}) {
            const double zn = step_z_bounded(z, 0.004, p, draw);
            CHECK(zn >= 0.0);
            CHECK(zn <= 1.0);
            const double zl = step_z_bounded(z, 0.004, p, draw, ModelKind::Legacy);
            CHECK(zl >= 0.0);
            CHECK(zl <= 1.0);
        }
    }
}

TEST_CASE("step_z_bounded one-step mean matches the drift (Monte Carlo)") {
    GrowthParams p = table_params();
    const double z = 0.02, dt = 0.004;
    const std::size_t n = 1000000;
    GaussianSampler noise(123, 0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double inc = step_z_bounded(z, dt, p, noise.next()) - z;
        sum += inc;
        sum2 += inc * inc;
    }
    const double mean = sum / double(n);
    const double var = sum2 / double(n) - mean * mean;
    const double se = std::sqrt(var / double(n));
    const double exact = p.d_relax * (1.0 - z) * dt;
    CHECK(std::abs(mean - exact) < 3.0 * se);
}

TEST_CASE("simulate_paths deterministic limit matches the closed form") {
    GrowthParams p = table_params();
    p.sigma = 0.0;
    const auto ens = simulate_paths(p, ModelKind::Proposed, {30.0, 90.0}, 0.004, 4, 1);
    for (std::size_t ti = 0; ti < 2; ++ti) {
        const double t = ens.times[ti];
        for (std::size_t path = 0; path < 4; ++path) {
            CHECK(std::exp(ens.w(ti, path)) ==
                  doctest::Approx(std::exp(ode_w(p, t))).epsilon(1e-3));
            CHECK(ens.z(ti, path) == doctest::Approx(ode_z(p, t)).epsilon(1e-9));
        }
    }
    // Expected terminal weight from the closed form (~51.8 g).
    CHECK(std::exp(ode_w(p, 90.0)) == doctest::Approx(51.8).epsilon(2e-3));
}

TEST_CASE("simulate_paths legacy deterministic limit matches a fine ODE solve") {
    GrowthParams p = table_params();
    p.sigma = 0.0;
    p.z0 = 0.03;
    // Independent oracle: RK4 on z' = z(1-z)(r+D), w' = r(1-z) at dt = 1e-3.
    double z = p.z0, w = p.w0();
    const double h = 1e-3;
    auto fz = [&](double zz) { return zz * (1.0 - zz) * (p.r + p.d_relax); };
    for (double t = 0.0; t < 90.0 - 0.5 * h; t += h) {
        const double k1 = fz(z), k2 = fz(z + 0.5 * h * k1), k3 = fz(z + 0.5 * h * k2),
                     k4 = fz(z + h * k3);
        w += p.r * (1.0 - z) * h; // left rule is enough at this h
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const auto ens = simulate_paths(p, ModelKind::Legacy, {90.0}, 0.004, 2, 1);
    CHECK(ens.z(0, 0) == doctest::Approx(z).epsilon(1e-3));
    CHECK(ens.w(0, 0) == doctest::Approx(w).epsilon(1e-3));
}

TEST_CASE("simulate_paths seed determinism") {
    GrowthParams p = table_params();
    const auto a = simulate_paths(p, ModelKind::Proposed, {10.0}, 0.01, 1, 7);
    const auto b = simulate_paths(p, ModelKind::Proposed, {10.0}, 0.01, 1, 7);
    CHECK(a.w_samples == b.w_samples);
    CHECK(a.z_samples == b.z_samples);
    const auto c = simulate_paths(p, ModelKind::Proposed, {10.0}, 0.01, 1, 8);
    CHECK(a.w_samples != c.w_samples);
}

TEST_CASE("path ensemble invariants: bounds, monotone w, drift envelope") {
    GrowthParams p = table_params();
    const std::vector<double> times{10.0, 30.0, 60.0, 90.0};
    for (ModelKind kind : {ModelKind::Proposed, ModelKind::Legacy}) {
        const auto ens = simulate_paths(p, kind, times, 0.01, 1000, 42);
        const double w0 = p.w0();
        for (std::size_t path = 0; path < ens.n_paths; ++path) {
            double prev_w = w0;
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                const double z = ens.z(ti, path);
                const double w = ens.w(ti, path);
                CHECK(z >= 0.0);
                CHECK(z <= 1.0);
                CHECK(w >= prev_w);
                CHECK(w >= w0 - 1e-12);
                CHECK(w <= w0 + p.r * times[ti] + p.r * 0.01 + 1e-12);
                prev_w = w;
            }
        }
    }
}

TEST_CASE("simulate_paths rejects invalid input") {
    GrowthParams p = table_params();
    p.z0 = 1.5;
    CHECK_THROWS_AS(simulate_paths(p, ModelKind::Proposed, {1.0}, 0.01, 1, 1),
                    ConfigError);
    GrowthParams q = table_params();
    q.sigma = 1.0; // violates 2 D >= sigma^2
    CHECK_THROWS_AS(simulate_paths(q, ModelKind::Proposed, {1.0}, 0.01, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(simulate_paths(table_params(), ModelKind::Proposed, {}, 0.01, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(
        simulate_paths(table_params(), ModelKind::Proposed, {2.0, 1.0}, 0.01, 1, 1),
        ConfigError);
}

TEST_CASE("stats_at conventions") {
    PathEnsemble ens;
    ens.times = {1.0};
    ens.n_paths = 3;
    ens.w_samples = {std::log(1.0), std::log(2.0), std::log(3.0)};
    ens.z_samples = {0.1, 0.1, 0.1};
    const SampleStats s = stats_at(ens, 0);
    CHECK(s.average == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(s.skewness == doctest::Approx(0.0).epsilon(1e-12));

    PathEnsemble degenerate;
    degenerate.times = {1.0};
    degenerate.n_paths = 2;
    degenerate.w_samples = {std::log(10.0), std::log(10.0)};
    degenerate.z_samples = {0.1, 0.1};
    CHECK_THROWS_AS((void)stats_at(degenerate, 0), std::domain_error);
}

TEST_CASE("ensemble statistics are independent of thread count by construction") {
    // Per-path substreams: the same path index gives the same samples no
    // matter how many paths surround it.
    GrowthParams p = table_params();
    const auto small = simulate_paths(p, ModelKind::Proposed, {5.0}, 0.01, 3, 11);
    const auto large = simulate_paths(p, ModelKind::Proposed, {5.0}, 0.01, 64, 11);
    for (std::size_t path = 0; path < 3; ++path) {
        CHECK(small.w(0, path) == large.w(0, path));
        CHECK(small.z(0, path) == large.z(0, path));
    }
}
