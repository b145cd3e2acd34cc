#pragma once

#include <cstddef>

#include "fpimpulse/field.hpp"

namespace fpimpulse {

// Heun predictor-corrector (explicit two-stage second-order Runge-Kutta):
//   u* = u + dt f(u),  u_{n+1} = u + dt/2 (f(u) + f(u*)).
template <class Rhs>
Field2D heun_step(const Field2D& state, Rhs&& rhs, double dt) {
    Field2D k1 = rhs(state);
    Field2D predictor = state;
    for (std::size_t i = 0; i < predictor.v.size(); ++i)
        predictor.v[i] += dt * k1.v[i];
    Field2D k2 = rhs(predictor);
    Field2D out = state;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] += 0.5 * dt * (k1.v[i] + k2.v[i]);
    return out;
}

// Scalar overload for the convergence tests.
template <class Rhs>
double heun_step_scalar(double state, Rhs&& rhs, double dt) {
    const double k1 = rhs(state);
    const double k2 = rhs(state + dt * k1);
    return state + 0.5 * dt * (k1 + k2);
}

} // namespace fpimpulse
