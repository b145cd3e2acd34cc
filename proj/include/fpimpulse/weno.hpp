#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fpimpulse {

// Ghost-node policy for the 1-D line kernels.
enum class LineBc {
    Periodic,       // wrap-around (used by the refinement studies)
    ConstantExtrap, // ghost = edge value (zero normal derivative)
};

// Fifth-order WENO-Z face value at x_{i+1/2} from the left-biased window
// f[0..4] = f_{i-2}, ..., f_{i+2}. Mirror the window to bias right.
double weno5_face(const double* f);

// Conservative interface fluxes of d/dx f(u) with local Lax-Friedrichs
// splitting f±(u) = (f ± alpha u)/2, each part reconstructed by WENO-Z.
// fhat has n+1 entries; fhat[i] sits at x_{i-1/2}. When zero_boundary_flux is
// set the domain-wall fluxes fhat[0] and fhat[n] are overridden to 0.
void weno5_interface_flux(const double* u, const double* f, std::size_t n,
                          double alpha, LineBc bc, bool zero_boundary_flux,
                          double* fhat);

// Flux-difference derivative (fhat[i+1] - fhat[i])/dx at every node.
std::vector<double> weno5_flux_derivative(const std::vector<double>& line,
                                          const std::function<double(double)>& flux,
                                          double alpha, double dx,
                                          LineBc bc = LineBc::ConstantExtrap,
                                          bool zero_boundary_flux = false);

// Fifth-order upwind-biased non-conservative derivative of point values.
// wind_sign > 0 biases the stencil left (advection speed > 0), < 0 right.
void weno5_upwind_derivative(const double* q, std::size_t n, int wind_sign,
                             double dx, LineBc bc, double* dq);
std::vector<double> weno5_upwind_derivative(const std::vector<double>& line,
                                            int wind_sign, double dx,
                                            LineBc bc = LineBc::ConstantExtrap);

// First-order upwind interface fluxes for a nonnegative per-node wave speed:
// fhat[i+1/2] = coef_i u_i. Monotone under the CFL bound; also the low-order
// scheme the bound-preserving limiter falls back to.
void upwind1_interface_flux(const double* u, const double* coef, std::size_t n,
                            bool zero_boundary_flux, double* fhat);

// First-order upwind gradient for the adjoint advection -coef dq/dx with
// coef >= 0 (wind is negative, so the one-sided difference looks right).
void upwind1_gradient(const double* q, std::size_t n, double dx, double* dq);

// Zalesak-style positivity limiting of the antidiffusive interface fluxes
// dF = high - low against per-cell budgets (the low-order updated values).
// theta[k] in [0, 1] is maximal such that the one-step update of every cell
// stays >= 0. Budgets below -1e-12 raise StabilityError.
void limit_antidiffusive(const double* dflux, const double* budget,
                         std::size_t n, double dt_over_dx, double* theta);

// Spec-shaped wrapper: returns the blended fluxes low + theta (high - low).
std::vector<double> apply_bp_limiter(const std::vector<double>& high_flux,
                                     const std::vector<double>& low_flux,
                                     const std::vector<double>& cell_values,
                                     double dt_over_dx);

// Second-order diffusion terms.
// Conservative form d^2(coeff u)/dx^2 with zero diffusive flux at the walls.
std::vector<double> central_diffusion_product(const std::vector<double>& line,
                                              const std::vector<double>& coeff,
                                              double dx);
// Non-divergence form coeff d^2 u/dx^2 with constant-extrapolation ghosts.
std::vector<double> central_diffusion_coeff(const std::vector<double>& line,
                                            const std::vector<double>& coeff,
                                            double dx);

} // namespace fpimpulse
