#include "fpimpulse/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "fpimpulse/errors.hpp"

namespace fpimpulse {

namespace {

// Trapezoidal integral of u_j * y over the domain, broadcasting partial
// controls along z.
double weighted_mass(const ControlPolicy& policy, std::size_t j, const Field2D& y) {
    const Grid2D& g = y.grid;
    if (policy.mode == InfoMode::PartialInfo) {
        std::vector<double> ybar = conditional_density(y);
        for (std::size_t i = 0; i < g.n_w; ++i) ybar[i] *= policy.u[j][i];
        return trapezoid(ybar, g.dw());
    }
    std::vector<double> rows(g.n_w);
    const double dz = g.dz();
    for (std::size_t i = 0; i < g.n_w; ++i) {
        const double* yr = &y.v[i * g.n_z];
        const double* ur = &policy.u[j][i * g.n_z];
        double sum = 0.5 * (yr[0] * ur[0] + yr[g.n_z - 1] * ur[g.n_z - 1]);
        for (std::size_t k = 1; k + 1 < g.n_z; ++k) sum += yr[k] * ur[k];
        rows[i] = sum * dz;
    }
    return trapezoid(rows, g.dw());
}

void check_shapes(const ControlPolicy& a, const ControlPolicy& b) {
    if (a.mode != b.mode || a.u.size() != b.u.size())
        throw ConfigError("control shape mismatch");
    for (std::size_t j = 0; j < a.u.size(); ++j)
        if (a.u[j].size() != b.u[j].size())
            throw ConfigError("control shape mismatch");
}

double sup_norm_change(const ControlPolicy& a, const ControlPolicy& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.u.size(); ++j)
        for (std::size_t k = 0; k < a.u[j].size(); ++k)
            d = std::max(d, std::abs(a.u[j][k] - b.u[j][k]));
    return d;
}

} // namespace

double objective(const Scenario& scenario, const ControlPolicy& policy,
                 const ForwardSolution& forward) {
    const std::size_t n_impulses = scenario.schedule.count();
    if (policy.u.size() != n_impulses || forward.y1_pre.size() != n_impulses)
        throw ConfigError("objective: policy/snapshot impulse count mismatch");
    double cost = 0.0;
    for (std::size_t j = 0; j < n_impulses; ++j)
        cost += scenario.cost_c * weighted_mass(policy, j, forward.y1_pre[j]);
    const double reward =
        window_integral(forward.y2_final, scenario.window_lo, scenario.window_hi);
    return cost - reward;
}

std::vector<double> extract_control_full(const Field2D& q1_plus,
                                         const Field2D& q2_plus, double c,
                                         double cap) {
    std::vector<double> u(q1_plus.v.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double switch_value = c - q1_plus.v[k] + q2_plus.v[k];
        u[k] = switch_value >= 0.0 ? 0.0 : cap;
    }
    return u;
}

std::vector<double> switching_function_partial(const Field2D& y1_at_tau,
                                               const Field2D& q1_plus,
                                               const Field2D& q2_plus, double c) {
    const Grid2D& g = y1_at_tau.grid;
    std::vector<double> L(g.n_w);
    const double dz = g.dz();
    for (std::size_t i = 0; i < g.n_w; ++i) {
        const double* y = &y1_at_tau.v[i * g.n_z];
        const double* q1 = &q1_plus.v[i * g.n_z];
        const double* q2 = &q2_plus.v[i * g.n_z];
        auto integrand = [&](std::size_t k) { return y[k] * (c - q1[k] + q2[k]); };
        double sum = 0.5 * (integrand(0) + integrand(g.n_z - 1));
        for (std::size_t k = 1; k + 1 < g.n_z; ++k) sum += integrand(k);
        L[i] = sum * dz;
    }
    return L;
}

std::vector<double> extract_control_partial(const std::vector<double>& switching,
                                            double cap) {
    std::vector<double> u(switching.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = switching[i] >= 0.0 ? 0.0 : cap;
    return u;
}

OptimizationReport optimize_full(const Scenario& scenario) {
    OptimizationReport report;
    BackwardResult back = solve_backward(scenario, InfoMode::FullInfo);
    report.policy = std::move(back.policy);
    const ForwardSolution forward = solve_forward(scenario, report.policy);
    report.objective_value = objective(scenario, report.policy, forward);
    report.iterations = 1;
    report.converged = true;
    return report;
}

OptimizationReport optimize_partial(const Scenario& scenario,
                                    std::size_t max_iters,
                                    const ControlPolicy* initial_guess) {
    if (max_iters < 1) throw ConfigError("optimize_partial: max_iters must be >= 1");
    const std::size_t n_impulses = scenario.schedule.count();
    ControlPolicy u_prev =
        initial_guess != nullptr
            ? *initial_guess
            : ControlPolicy::zeros(InfoMode::PartialInfo, n_impulses, scenario.grid,
                                   scenario.cap_u);
    u_prev.validate(scenario.grid, n_impulses);
    if (u_prev.mode != InfoMode::PartialInfo)
        throw ConfigError("optimize_partial: initial guess must be partial-information");

    OptimizationReport report;
    for (std::size_t k = 1; k <= max_iters; ++k) {
        ForwardSolution forward = solve_forward(scenario, u_prev);
        BackwardResult back = solve_backward(scenario, InfoMode::PartialInfo, &forward);
        const double delta = sup_norm_change(back.policy, u_prev);
        report.delta_history.push_back(delta);
        report.iterations = k;
        if (delta == 0.0) {
            report.policy = std::move(back.policy);
            report.objective_value = objective(scenario, report.policy, forward);
            report.converged = true;
            return report;
        }
        u_prev = std::move(back.policy);
    }
    // Budget exhausted: report the last iterate honestly.
    report.policy = u_prev;
    const ForwardSolution forward = solve_forward(scenario, u_prev);
    report.objective_value = objective(scenario, u_prev, forward);
    report.converged = false;
    return report;
}

double gateaux_derivative(const Scenario& scenario, const ControlPolicy& policy,
                          const ControlPolicy& direction,
                          const AdjointSolution& adjoint,
                          const ForwardSolution& forward) {
    check_shapes(policy, direction);
    const std::size_t n_impulses = scenario.schedule.count();
    if (adjoint.q1_post.size() != n_impulses || forward.y1_pre.size() != n_impulses)
        throw ConfigError("gateaux_derivative: snapshot impulse count mismatch");

    const Grid2D& g = scenario.grid;
    double total = 0.0;
    for (std::size_t j = 0; j < n_impulses; ++j) {
        const Field2D& y1 = forward.y1_pre[j];
        const Field2D& q1 = adjoint.q1_post[j];
        const Field2D& q2 = adjoint.q2_post[j];
        if (direction.mode == InfoMode::PartialInfo) {
            const auto L =
                switching_function_partial(y1, q1, q2, scenario.cost_c);
            std::vector<double> integrand(g.n_w);
            for (std::size_t i = 0; i < g.n_w; ++i)
                integrand[i] = direction.u[j][i] * L[i];
            total += trapezoid(integrand, g.dw());
        } else {
            std::vector<double> rows(g.n_w);
            const double dz = g.dz();
            for (std::size_t i = 0; i < g.n_w; ++i) {
                const double* yv = &y1.v[i * g.n_z];
                const double* q1v = &q1.v[i * g.n_z];
                const double* q2v = &q2.v[i * g.n_z];
                const double* vv = &direction.u[j][i * g.n_z];
                auto f = [&](std::size_t k) {
                    return vv[k] * yv[k] * (scenario.cost_c - q1v[k] + q2v[k]);
                };
                double sum = 0.5 * (f(0) + f(g.n_z - 1));
                for (std::size_t k = 1; k + 1 < g.n_z; ++k) sum += f(k);
                rows[i] = sum * dz;
            }
            total += trapezoid(rows, g.dw());
        }
    }
    return total;
}

std::vector<ActiveInterval> active_intervals(const ControlPolicy& policy,
                                             const Scenario& scenario, double c) {
    if (policy.mode != InfoMode::PartialInfo)
        throw ConfigError("active_intervals: partial-information policies only");
    const Grid2D& g = scenario.grid;
    std::vector<ActiveInterval> out;
    for (std::size_t j = 0; j < policy.u.size(); ++j) {
        const auto& uj = policy.u[j];
        std::size_t i = 0;
        while (i < uj.size()) {
            if (uj[i] > 0.5 * policy.cap) {
                std::size_t end = i;
                while (end + 1 < uj.size() && uj[end + 1] > 0.5 * policy.cap) ++end;
                ActiveInterval interval;
                interval.c = c;
                interval.j = j;
                interval.tau = scenario.schedule.times[j];
                interval.w_lo = g.w(i);
                interval.w_hi = g.w(end);
                interval.node_count = end - i + 1;
                out.push_back(interval);
                i = end + 1;
            } else {
                ++i;
            }
        }
    }
    return out;
}

std::vector<SweepEntry> cost_sweep(const Scenario& scenario,
                                   const std::vector<double>& c_values,
                                   std::size_t max_iters) {
    if (c_values.empty()) throw ConfigError("cost_sweep: c_values must be nonempty");
    std::vector<SweepEntry> entries;
    entries.reserve(c_values.size());
    for (double c : c_values) {
        Scenario sc = scenario;
        sc.cost_c = c;
        SweepEntry entry;
        entry.c = c;
        entry.report = optimize_partial(sc, max_iters);
        entry.intervals = active_intervals(entry.report.policy, sc, c);
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace fpimpulse
