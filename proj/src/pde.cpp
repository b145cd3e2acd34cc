#include "fpimpulse/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpimpulse/errors.hpp"
#include "fpimpulse/optimize.hpp"
#include "fpimpulse/weno.hpp"

namespace fpimpulse {

namespace {

// Per-habitat coefficient tables sampled on the grid.
struct Coefficients {
    std::vector<double> bw;   // r (1-z_j): w-advection speed per z index
    std::vector<double> az;   // A(z_j) = D (1-z_j)
    std::vector<double> c2h;  // C^2(z_j)/2
    double r = 0.0;
    double mortality = 0.0;

    Coefficients(const HabitatParams& h, const Grid2D& g) {
        bw.resize(g.n_z);
        az.resize(g.n_z);
        c2h.resize(g.n_z);
        for (std::size_t j = 0; j < g.n_z; ++j) {
            const double z = g.z(j);
            bw[j] = h.growth.r * (1.0 - z);
            az[j] = h.advection_z(z);
            c2h[j] = h.half_c2(z);
        }
        r = h.growth.r;
        mortality = h.mortality;
    }
};

// One bound-preserving forward Euler stage; two stages averaged with the
// initial state give the Heun step. Buffers are reused across steps.
class FpeStepper {
public:
    FpeStepper(const HabitatParams& habitat, const Grid2D& grid)
        : grid_(grid), coef_(habitat, grid) {
        const std::size_t n_w = grid.n_w, n_z = grid.n_z;
        fw_hi_.resize((n_w + 1) * n_z);
        fw_lo_.resize((n_w + 1) * n_z);
        fz_hi_.resize(n_w * (n_z + 1));
        fz_lo_.resize(n_w * (n_z + 1));
        budget_.resize(n_w * n_z);
        stage1_.resize(n_w * n_z);
    }

    // out = in + dt * limited tendency(in); out may alias nothing.
    void stage(const Field2D& in, double dt, Field2D& out) {
        const std::size_t n_w = grid_.n_w, n_z = grid_.n_z;
        const double dw = grid_.dw(), dz = grid_.dz();
        const double lw = dt / dw, lz = dt / dz;

        // High- and low-order interface fluxes, w direction (per z index).
#pragma omp parallel for schedule(static)
        for (long long jz = 0; jz < static_cast<long long>(n_z); ++jz) {
            const auto iz = static_cast<std::size_t>(jz);
            const double b = coef_.bw[iz];
            static thread_local std::vector<double> u, f, fhat;
            u.resize(n_w);
            f.resize(n_w);
            fhat.resize(n_w + 1);
            for (std::size_t i = 0; i < n_w; ++i) {
                u[i] = in.v[i * n_z + iz];
                f[i] = b * u[i];
            }
            weno5_interface_flux(u.data(), f.data(), n_w, b, LineBc::ConstantExtrap,
                                 true, fhat.data());
            for (std::size_t k = 0; k <= n_w; ++k) fw_hi_[k * n_z + iz] = fhat[k];
            fw_lo_[iz] = 0.0;
            for (std::size_t k = 1; k < n_w; ++k)
                fw_lo_[k * n_z + iz] = b * u[k - 1];
            fw_lo_[n_w * n_z + iz] = 0.0;
        }

        // z direction (per w index); advection plus diffusion budget terms.
#pragma omp parallel for schedule(static)
        for (long long jw = 0; jw < static_cast<long long>(n_w); ++jw) {
            const auto iw = static_cast<std::size_t>(jw);
            const double* u = &in.v[iw * n_z];
            static thread_local std::vector<double> f, fhat;
            f.resize(n_z);
            fhat.resize(n_z + 1);
            const double alpha = coef_.az[0]; // max A on the line (z = 0)
            for (std::size_t j = 0; j < n_z; ++j) f[j] = coef_.az[j] * u[j];
            weno5_interface_flux(u, f.data(), n_z, alpha, LineBc::ConstantExtrap,
                                 true, fhat.data());
            double* hi = &fz_hi_[iw * (n_z + 1)];
            double* lo = &fz_lo_[iw * (n_z + 1)];
            std::copy(fhat.begin(), fhat.end(), hi);
            upwind1_interface_flux(u, coef_.az.data(), n_z, true, lo);

            // Low-order update: upwind advection + diffusion + mortality.
            double* bud = &budget_[iw * n_z];
            const double inv_dz2 = dt / (dz * dz);
            for (std::size_t j = 0; j < n_z; ++j) {
                const double m = coef_.c2h[j] * u[j];
                const double m_hi = (j + 1 < n_z) ? coef_.c2h[j + 1] * u[j + 1] - m : 0.0;
                const double m_lo = (j > 0) ? m - coef_.c2h[j - 1] * u[j - 1] : 0.0;
                bud[j] = u[j] * (1.0 - coef_.mortality * dt) -
                         lz * (lo[j + 1] - lo[j]) + inv_dz2 * (m_hi - m_lo);
            }
        }

        // Fold the low-order w fluxes into the budget.
#pragma omp parallel for schedule(static)
        for (long long jw = 0; jw < static_cast<long long>(n_w); ++jw) {
            const auto iw = static_cast<std::size_t>(jw);
            for (std::size_t iz = 0; iz < n_z; ++iz)
                budget_[iw * n_z + iz] -=
                    lw * (fw_lo_[(iw + 1) * n_z + iz] - fw_lo_[iw * n_z + iz]);
        }

        // Limit the w antidiffusive fluxes against the combined budget.
#pragma omp parallel for schedule(static)
        for (long long jz = 0; jz < static_cast<long long>(n_z); ++jz) {
            const auto iz = static_cast<std::size_t>(jz);
            static thread_local std::vector<double> df, bud, theta;
            df.resize(n_w + 1);
            bud.resize(n_w);
            theta.resize(n_w + 1);
            for (std::size_t k = 0; k <= n_w; ++k)
                df[k] = fw_hi_[k * n_z + iz] - fw_lo_[k * n_z + iz];
            for (std::size_t i = 0; i < n_w; ++i) bud[i] = budget_[i * n_z + iz];
            limit_antidiffusive(df.data(), bud.data(), n_w, lw, theta.data());
            for (std::size_t i = 0; i < n_w; ++i)
                stage1_[i * n_z + iz] =
                    bud[i] - lw * (theta[i + 1] * df[i + 1] - theta[i] * df[i]);
        }

        // Limit the z antidiffusive fluxes against the running values.
        out.grid = grid_;
        out.v.resize(n_w * n_z);
#pragma omp parallel for schedule(static)
        for (long long jw = 0; jw < static_cast<long long>(n_w); ++jw) {
            const auto iw = static_cast<std::size_t>(jw);
            static thread_local std::vector<double> df, theta;
            df.resize(n_z + 1);
            theta.resize(n_z + 1);
            const double* hi = &fz_hi_[iw * (n_z + 1)];
            const double* lo = &fz_lo_[iw * (n_z + 1)];
            for (std::size_t k = 0; k <= n_z; ++k) df[k] = hi[k] - lo[k];
            const double* bud = &stage1_[iw * n_z];
            limit_antidiffusive(df.data(), bud, n_z, lz, theta.data());
            double* o = &out.v[iw * n_z];
            for (std::size_t j = 0; j < n_z; ++j)
                o[j] = bud[j] - lz * (theta[j + 1] * df[j + 1] - theta[j] * df[j]);
        }
    }

    // Full Heun step with per-stage limiting.
    void step(Field2D& y, double dt) {
        stage(y, dt, s1_);
        stage(s1_, dt, s2_);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(y.v.size()); ++i)
            y.v[i] = 0.5 * (y.v[i] + s2_.v[i]);
    }

private:
    Grid2D grid_;
    Coefficients coef_;
    std::vector<double> fw_hi_, fw_lo_, fz_hi_, fz_lo_, budget_, stage1_;
    Field2D s1_, s2_;
};

// Plain Heun stepper for the adjoint pair (no limiting; adjoints change sign).
class AdjointStepper {
public:
    AdjointStepper(const HabitatParams& habitat, const Grid2D& grid)
        : grid_(grid), coef_(habitat, grid) {}

    void rhs(const Field2D& q, Field2D& out) const {
        const std::size_t n_w = grid_.n_w, n_z = grid_.n_z;
        const double dw = grid_.dw(), dz = grid_.dz();
        out.grid = grid_;
        out.v.resize(n_w * n_z);

        // w advection: + r (1-z) dq/dw, wind negative in backward time.
#pragma omp parallel for schedule(static)
        for (long long jz = 0; jz < static_cast<long long>(n_z); ++jz) {
            const auto iz = static_cast<std::size_t>(jz);
            static thread_local std::vector<double> q_line, dq;
            q_line.resize(n_w);
            dq.resize(n_w);
            for (std::size_t i = 0; i < n_w; ++i) q_line[i] = q.v[i * n_z + iz];
            weno5_upwind_derivative(q_line.data(), n_w, -1, dw,
                                    LineBc::ConstantExtrap, dq.data());
            const double b = coef_.bw[iz];
            for (std::size_t i = 0; i < n_w; ++i) out.v[i * n_z + iz] = b * dq[i];
        }

        // z advection + diffusion + mortality.
#pragma omp parallel for schedule(static)
        for (long long jw = 0; jw < static_cast<long long>(n_w); ++jw) {
            const auto iw = static_cast<std::size_t>(jw);
            const double* q_line = &q.v[iw * n_z];
            static thread_local std::vector<double> dq;
            dq.resize(n_z);
            weno5_upwind_derivative(q_line, n_z, -1, dz, LineBc::ConstantExtrap,
                                    dq.data());
            double* o = &out.v[iw * n_z];
            const double inv_dz2 = 1.0 / (dz * dz);
            for (std::size_t j = 0; j < n_z; ++j) {
                const double ql = (j > 0) ? q_line[j - 1] : q_line[0];
                const double qr = (j + 1 < n_z) ? q_line[j + 1] : q_line[n_z - 1];
                const double diff = coef_.c2h[j] * (qr - 2.0 * q_line[j] + ql) * inv_dz2;
                o[j] += coef_.az[j] * dq[j] + diff - coef_.mortality * q_line[j];
            }
        }
    }

    void step(Field2D& q, double dt) {
        rhs(q, k1_);
        pred_.grid = grid_;
        pred_.v.resize(q.v.size());
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(q.v.size()); ++i)
            pred_.v[i] = q.v[i] + dt * k1_.v[i];
        rhs(pred_, k2_);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(q.v.size()); ++i)
            q.v[i] += 0.5 * dt * (k1_.v[i] + k2_.v[i]);
    }

private:
    Grid2D grid_;
    Coefficients coef_;
    Field2D k1_, k2_, pred_;
};

std::size_t snap_to_step(double t, double dt) {
    return static_cast<std::size_t>(std::llround(t / dt));
}

} // namespace

double cfl_limit(const HabitatParams& habitat, const Grid2D& grid) {
    const double dw = grid.dw(), dz = grid.dz();
    const double r = habitat.growth.r;
    const double max_a = habitat.growth.d_relax; // A(z) = D (1-z), max at z=0
    const double s2 = habitat.growth.sigma * habitat.growth.sigma;
    const double max_half_c2 = s2 / 8.0;         // C^2/2 peaks at z = 1/2
    double lim = dw / r;
    lim = std::min(lim, dz / max_a);
    if (max_half_c2 > 0.0) lim = std::min(lim, dz * dz / (2.0 * max_half_c2));
    return 0.9 * lim;
}

void check_cfl(const HabitatParams& habitat, const Grid2D& grid, double dt) {
    const double lim = cfl_limit(habitat, grid);
    if (dt > lim)
        throw StabilityError("dt = " + std::to_string(dt) +
                             " exceeds the CFL bound " + std::to_string(lim));
}

Field2D fpe_rhs(const Field2D& y, const HabitatParams& habitat) {
    const Grid2D& g = y.grid;
    const std::size_t n_w = g.n_w, n_z = g.n_z;
    const double dw = g.dw(), dz = g.dz();
    const Coefficients coef(habitat, g);
    Field2D out(g);

#pragma omp parallel for schedule(static)
    for (long long jz = 0; jz < static_cast<long long>(n_z); ++jz) {
        const auto iz = static_cast<std::size_t>(jz);
        const double b = coef.bw[iz];
        static thread_local std::vector<double> u, f, fhat;
        u.resize(n_w);
        f.resize(n_w);
        fhat.resize(n_w + 1);
        for (std::size_t i = 0; i < n_w; ++i) {
            u[i] = y.v[i * n_z + iz];
            f[i] = b * u[i];
        }
        weno5_interface_flux(u.data(), f.data(), n_w, b, LineBc::ConstantExtrap,
                             true, fhat.data());
        for (std::size_t i = 0; i < n_w; ++i)
            out.v[i * n_z + iz] = -(fhat[i + 1] - fhat[i]) / dw;
    }

#pragma omp parallel for schedule(static)
    for (long long jw = 0; jw < static_cast<long long>(n_w); ++jw) {
        const auto iw = static_cast<std::size_t>(jw);
        const double* u = &y.v[iw * n_z];
        static thread_local std::vector<double> f, fhat;
        f.resize(n_z);
        fhat.resize(n_z + 1);
        for (std::size_t j = 0; j < n_z; ++j) f[j] = coef.az[j] * u[j];
        weno5_interface_flux(u, f.data(), n_z, coef.az[0], LineBc::ConstantExtrap,
                             true, fhat.data());
        double* o = &out.v[iw * n_z];
        const double inv_dz2 = 1.0 / (dz * dz);
        for (std::size_t j = 0; j < n_z; ++j) {
            const double m = coef.c2h[j] * u[j];
            const double g_hi = (j + 1 < n_z) ? coef.c2h[j + 1] * u[j + 1] - m : 0.0;
            const double g_lo = (j > 0) ? m - coef.c2h[j - 1] * u[j - 1] : 0.0;
            o[j] += -(fhat[j + 1] - fhat[j]) / dz + (g_hi - g_lo) * inv_dz2 -
                    coef.mortality * u[j];
        }
    }
    return out;
}

Field2D advance_fpe(const Field2D& y, const HabitatParams& habitat, double t0,
                    double t1, double dt) {
    if (!(t1 > t0)) throw ConfigError("advance_fpe: t1 must exceed t0");
    if (!(dt > 0.0)) throw ConfigError("advance_fpe: dt must be > 0");
    const double span = t1 - t0;
    const auto n_steps = static_cast<std::size_t>(std::llround(span / dt));
    if (n_steps == 0 || std::abs(double(n_steps) * dt - span) > 1e-9 * std::max(1.0, span))
        throw ConfigError("advance_fpe: dt must divide t1 - t0");
    check_cfl(habitat, y.grid, dt);

    Field2D out = y;
    FpeStepper stepper(habitat, y.grid);
    for (std::size_t s = 0; s < n_steps; ++s) stepper.step(out, dt);
    return out;
}

void apply_transport_impulse(Field2D& y1, Field2D& y2, const ControlPolicy& policy,
                             std::size_t j) {
    const Grid2D& g = y1.grid;
    if (j >= policy.u.size()) throw PolicyError("impulse index out of range");
    for (double v : policy.u[j])
        if (!(v >= -1e-12 && v <= policy.cap + 1e-12))
            throw PolicyError("control values must lie in [0, cap]");

    if (policy.mode == InfoMode::PartialInfo) {
        for (std::size_t iw = 0; iw < g.n_w; ++iw) {
            const double uj = policy.u[j][iw];
            double* r1 = &y1.v[iw * g.n_z];
            double* r2 = &y2.v[iw * g.n_z];
            for (std::size_t iz = 0; iz < g.n_z; ++iz) {
                const double moved = uj * r1[iz];
                r1[iz] -= moved;
                r2[iz] += moved;
            }
        }
    } else {
        for (std::size_t k = 0; k < y1.v.size(); ++k) {
            const double moved = policy.u[j][k] * y1.v[k];
            y1.v[k] -= moved;
            y2.v[k] += moved;
        }
    }
}

ForwardSolution solve_forward(const Scenario& scenario, const ControlPolicy& policy,
                              std::size_t record_every_steps) {
    scenario.validate();
    const Grid2D& g = scenario.grid;
    const std::size_t n_impulses = scenario.schedule.count();
    policy.validate(g, n_impulses);
    check_cfl(scenario.habitat1, g, scenario.dt);
    check_cfl(scenario.habitat2, g, scenario.dt);

    const double dt = scenario.dt;
    const std::size_t total_steps = snap_to_step(scenario.schedule.horizon, dt);
    std::vector<std::size_t> impulse_steps(n_impulses);
    for (std::size_t j = 0; j < n_impulses; ++j)
        impulse_steps[j] = snap_to_step(scenario.schedule.times[j], dt);

    ForwardSolution sol;
    sol.impulse_times = scenario.schedule.times;

    Field2D y1 = initial_population(scenario);
    Field2D y2(g);
    FpeStepper stepper1(scenario.habitat1, g);
    FpeStepper stepper2(scenario.habitat2, g);

    auto record_mass = [&](double t) {
        sol.mass_times.push_back(t);
        sol.mass1.push_back(integrate(y1));
        sol.mass2.push_back(integrate(y2));
    };
    auto record_ybar = [&](double t) {
        sol.record_times.push_back(t);
        sol.ybar1_records.push_back(conditional_density(y1));
        sol.ybar2_records.push_back(conditional_density(y2));
    };

    record_mass(0.0);
    record_ybar(0.0);

    std::size_t next_impulse = 0;
    for (std::size_t s = 0; s < total_steps; ++s) {
        stepper1.step(y1, dt);
        stepper2.step(y2, dt);
        const double t = double(s + 1) * dt;
        record_mass(t);

        if (next_impulse < n_impulses && s + 1 == impulse_steps[next_impulse]) {
            sol.y1_pre.push_back(y1);
            sol.y2_pre.push_back(y2);
            apply_transport_impulse(y1, y2, policy, next_impulse);
            sol.y1_post.push_back(y1);
            sol.y2_post.push_back(y2);
            record_ybar(t);
            ++next_impulse;
        } else if (record_every_steps > 0 && (s + 1) % record_every_steps == 0) {
            record_ybar(t);
        }
    }
    if (sol.record_times.empty() || sol.record_times.back() != double(total_steps) * dt)
        record_ybar(double(total_steps) * dt);
    sol.y1_final = std::move(y1);
    sol.y2_final = std::move(y2);
    return sol;
}

Field2D adjoint_rhs(const Field2D& q, const HabitatParams& habitat) {
    AdjointStepper stepper(habitat, q.grid);
    Field2D out;
    stepper.rhs(q, out);
    return out;
}

void adjoint_impulse(Field2D& q1, Field2D& q2, const ControlPolicy& policy,
                     std::size_t j, double c) {
    const Grid2D& g = q1.grid;
    if (j >= policy.u.size()) throw PolicyError("impulse index out of range");
    (void)q2; // continuous across the impulse
    for (std::size_t iw = 0; iw < g.n_w; ++iw) {
        double* r1 = &q1.v[iw * g.n_z];
        const double* r2 = &q2.v[iw * g.n_z];
        for (std::size_t iz = 0; iz < g.n_z; ++iz) {
            const double uj = policy.value(j, iw, iz, g);
            r1[iz] += uj * (c - r1[iz] + r2[iz]);
        }
    }
}

Field2D terminal_adjoint2(const Scenario& scenario) {
    const Grid2D& g = scenario.grid;
    Field2D q2(g);
    const double dw = g.dw();
    for (std::size_t iw = 0; iw < g.n_w; ++iw) {
        const double w = g.w(iw);
        double val = 0.0;
        if (std::abs(w - scenario.window_lo) < 0.5 * dw ||
            std::abs(w - scenario.window_hi) < 0.5 * dw)
            val = -0.5;
        else if (w > scenario.window_lo && w < scenario.window_hi)
            val = -1.0;
        if (val != 0.0)
            for (std::size_t iz = 0; iz < g.n_z; ++iz) q2.at(iw, iz) = val;
    }
    return q2;
}

namespace {

// Shared backward sweep. extract == true pulls the bang-bang control out of
// the adjoints at each impulse; otherwise given_policy supplies the interface
// values.
BackwardResult backward_sweep(const Scenario& scenario, InfoMode mode,
                              const ForwardSolution* forward,
                              const ControlPolicy* given_policy) {
    scenario.validate();
    const Grid2D& g = scenario.grid;
    const double dt = scenario.dt;
    const std::size_t n_impulses = scenario.schedule.count();
    check_cfl(scenario.habitat1, g, dt);
    check_cfl(scenario.habitat2, g, dt);
    const bool extract = given_policy == nullptr;
    if (extract && mode == InfoMode::PartialInfo) {
        if (forward == nullptr || forward->y1_pre.size() != n_impulses)
            throw ConfigError("solve_backward: partial-information extraction needs "
                              "forward snapshots at every impulse");
    }
    if (!extract) given_policy->validate(g, n_impulses);

    const std::size_t total_steps = snap_to_step(scenario.schedule.horizon, dt);
    std::vector<std::size_t> impulse_steps(n_impulses);
    for (std::size_t j = 0; j < n_impulses; ++j)
        impulse_steps[j] = snap_to_step(scenario.schedule.times[j], dt);

    BackwardResult res;
    res.adjoint.impulse_times = scenario.schedule.times;
    res.adjoint.q1_post.resize(n_impulses);
    res.adjoint.q2_post.resize(n_impulses);
    res.policy = extract ? ControlPolicy::zeros(mode, n_impulses, g, scenario.cap_u)
                         : *given_policy;

    Field2D q1(g);
    Field2D q2 = terminal_adjoint2(scenario);
    AdjointStepper stepper1(scenario.habitat1, g);
    AdjointStepper stepper2(scenario.habitat2, g);

    // Walk backward in t; s is the number of backward steps taken from T.
    std::size_t step_t = total_steps;
    for (std::size_t j = n_impulses; j-- > 0;) {
        while (step_t > impulse_steps[j]) {
            stepper1.step(q1, dt);
            stepper2.step(q2, dt);
            --step_t;
        }
        res.adjoint.q1_post[j] = q1;
        res.adjoint.q2_post[j] = q2;
        if (extract) {
            if (mode == InfoMode::FullInfo) {
                res.policy.u[j] = extract_control_full(q1, q2, scenario.cost_c,
                                                       scenario.cap_u);
            } else {
                const auto L = switching_function_partial(forward->y1_pre[j], q1, q2,
                                                          scenario.cost_c);
                res.policy.u[j] = extract_control_partial(L, scenario.cap_u);
            }
        }
        adjoint_impulse(q1, q2, res.policy, j, scenario.cost_c);
    }
    while (step_t > 0) {
        stepper1.step(q1, dt);
        stepper2.step(q2, dt);
        --step_t;
    }
    res.adjoint.q1_initial = std::move(q1);
    res.adjoint.q2_initial = std::move(q2);
    return res;
}

} // namespace

BackwardResult solve_backward(const Scenario& scenario, InfoMode mode,
                              const ForwardSolution* forward) {
    return backward_sweep(scenario, mode, forward, nullptr);
}

AdjointSolution solve_backward_under_policy(const Scenario& scenario,
                                            const ControlPolicy& policy) {
    return backward_sweep(scenario, policy.mode, nullptr, &policy).adjoint;
}

} // namespace fpimpulse
