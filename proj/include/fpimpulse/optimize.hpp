#pragma once

#include <cstddef>
#include <vector>

#include "fpimpulse/field.hpp"
#include "fpimpulse/pde.hpp"
#include "fpimpulse/scenario.hpp"

namespace fpimpulse {

struct OptimizationReport {
    ControlPolicy policy;
    double objective_value = 0.0;
    std::size_t iterations = 0;
    std::vector<double> delta_history; // sup-norm control change per iteration
    bool converged = false;
};

// Transport cost minus the terminal reward:
//   sum_j c int u_j y1(tau_j) dw dz - int_{omega x (0,1)} y2(T) dw dz.
// The forward solution must have been computed under the same policy.
double objective(const Scenario& scenario, const ControlPolicy& policy,
                 const ForwardSolution& forward);

// Bang-bang extraction from the post-impulse adjoints.
// Full information: u = cap where c - q1+ + q2+ < 0, else 0.
std::vector<double> extract_control_full(const Field2D& q1_plus,
                                         const Field2D& q2_plus, double c,
                                         double cap);

// Partial information: per-w switching integral
//   L_j(w) = int_0^1 y1(tau_j) (c - q1+ + q2+) dz.
std::vector<double> switching_function_partial(const Field2D& y1_at_tau,
                                               const Field2D& q1_plus,
                                               const Field2D& q2_plus, double c);

// u(w) = cap where L(w) < 0, else 0 (ties resolve to 0).
std::vector<double> extract_control_partial(const std::vector<double>& switching,
                                            double cap);

// Full information needs a single backward sweep plus one forward evaluation.
OptimizationReport optimize_full(const Scenario& scenario);

// Partial information: Picard alternation of forward and backward solves
// until the extracted control repeats exactly (bang-bang values make the
// sup-norm change hit zero) or the iteration budget runs out.
OptimizationReport optimize_partial(const Scenario& scenario,
                                    std::size_t max_iters = 50,
                                    const ControlPolicy* initial_guess = nullptr);

// Directional derivative of the objective at `policy` in `direction`:
//   sum_j int direction_j y1(tau_j) (c - q1(tau_j+) + q2(tau_j+)) dw dz.
// Adjoint and forward must both have been computed under `policy`.
double gateaux_derivative(const Scenario& scenario, const ControlPolicy& policy,
                          const ControlPolicy& direction,
                          const AdjointSolution& adjoint,
                          const ForwardSolution& forward);

// Closed w-interval where one impulse's control sits at the cap.
struct ActiveInterval {
    double c = 0.0;
    std::size_t j = 0; // impulse index (0-based)
    double tau = 0.0;
    double w_lo = 0.0;
    double w_hi = 0.0;
    std::size_t node_count = 0;
};

// Contiguous cap-valued runs of a partial-information policy, one entry per
// run; empty active sets contribute nothing.
std::vector<ActiveInterval> active_intervals(const ControlPolicy& policy,
                                             const Scenario& scenario, double c);

struct SweepEntry {
    double c = 0.0;
    OptimizationReport report;
    std::vector<ActiveInterval> intervals;
};

// optimize_partial per cost value, plus the active-set summary.
std::vector<SweepEntry> cost_sweep(const Scenario& scenario,
                                   const std::vector<double>& c_values,
                                   std::size_t max_iters = 50);

} // namespace fpimpulse
