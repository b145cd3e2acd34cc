#pragma once

#include <cstddef>
#include <vector>

#include "fpimpulse/field.hpp"
#include "fpimpulse/scenario.hpp"

namespace fpimpulse {

// Population fields stored around every impulse plus the terminal time,
// with per-step total-mass history and coarse conditional-density records.
struct ForwardSolution {
    std::vector<double> impulse_times;
    std::vector<Field2D> y1_pre, y2_pre;   // at tau_j
    std::vector<Field2D> y1_post, y2_post; // at tau_j+
    Field2D y1_final, y2_final;            // at T

    std::vector<double> mass_times;
    std::vector<double> mass1, mass2;

    std::vector<double> record_times;
    std::vector<std::vector<double>> ybar1_records, ybar2_records;
};

// Adjoint fields just after each impulse (backward sweep) and at t = 0.
struct AdjointSolution {
    std::vector<double> impulse_times;
    std::vector<Field2D> q1_post, q2_post; // at tau_j+
    Field2D q1_initial, q2_initial;        // at t = 0
};

struct BackwardResult {
    AdjointSolution adjoint;
    ControlPolicy policy;
};

// Largest stable step for the explicit scheme:
// 0.9 min(dw / max r(1-z), dz / max A, dz^2 / (2 max C^2/2)).
double cfl_limit(const HabitatParams& habitat, const Grid2D& grid);
void check_cfl(const HabitatParams& habitat, const Grid2D& grid, double dt);

// High-order tendency of the population equation:
//   -d_w(r (1-z) y) - d_z(A(z) y - d_z(C^2(z) y / 2)) - R y
// with conservative WENO advection, central diffusion of the product, and
// zero flux through all four boundaries.
Field2D fpe_rhs(const Field2D& y, const HabitatParams& habitat);

// Heun steps from t0 to t1 with the bound-preserving limiter applied per
// stage. Result stays >= -1e-12 and total mass follows e^{-R (t1-t0)} decay.
Field2D advance_fpe(const Field2D& y, const HabitatParams& habitat, double t0,
                    double t1, double dt);

// Pointwise transport at one impulse: y1 <- (1-u) y1, y2 <- u y1 + y2.
// Partial-information controls broadcast along z.
void apply_transport_impulse(Field2D& y1, Field2D& y2, const ControlPolicy& policy,
                             std::size_t j);

// Alternates advance_fpe and apply_transport_impulse over [0, T].
// record_every_steps controls the conditional-density history granularity.
ForwardSolution solve_forward(const Scenario& scenario, const ControlPolicy& policy,
                              std::size_t record_every_steps = 100);

// Backward-time tendency dq/ds (s = T - t) of the adjoint equation:
//   dq/ds = r (1-z) d_w q + A(z) d_z q + (C^2/2) d^2_z q - R q
// with upwind non-conservative WENO advection, central diffusion, and
// homogeneous Neumann conditions on all boundaries.
Field2D adjoint_rhs(const Field2D& q, const HabitatParams& habitat);

// Interface condition at tau_j (applied while sweeping backward):
//   q1(tau_j) = q1(tau_j+) + u_j (c - q1(tau_j+) + q2(tau_j+)),
//   q2(tau_j) = q2(tau_j+).
void adjoint_impulse(Field2D& q1, Field2D& q2, const ControlPolicy& policy,
                     std::size_t j, double c);

// Terminal adjoint data: q2(T) = -1 on omega x (0,1), 0 outside, with the
// window-boundary nodes assigned -1/2; q1(T) = 0.
Field2D terminal_adjoint2(const Scenario& scenario);

// Integrates the adjoint pair backward from T, extracting the bang-bang
// control at each impulse before applying the interface condition.
// PartialInfo requires the forward snapshots (switching integral against
// y1(tau_j)); FullInfo needs none.
BackwardResult solve_backward(const Scenario& scenario, InfoMode mode,
                              const ForwardSolution* forward = nullptr);

// Same sweep but with the interface conditions evaluated at a given policy
// (no extraction); used for derivative evaluation at arbitrary controls.
AdjointSolution solve_backward_under_policy(const Scenario& scenario,
                                            const ControlPolicy& policy);

} // namespace fpimpulse
