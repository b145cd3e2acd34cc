#include "fpimpulse/weno.hpp"

#include <algorithm>
#include <cmath>

#include "fpimpulse/errors.hpp"

namespace fpimpulse {

namespace {

constexpr std::size_t kGhost = 3;
constexpr double kWenoEps = 1e-40;

// Pad a line with 3 ghost nodes per side according to the boundary rule.
void pad_line(const double* u, std::size_t n, LineBc bc, std::vector<double>& ext) {
    ext.resize(n + 2 * kGhost);
    std::copy(u, u + n, ext.begin() + kGhost);
    for (std::size_t g = 0; g < kGhost; ++g) {
        if (bc == LineBc::Periodic) {
            ext[kGhost - 1 - g] = u[n - 1 - g];
            ext[kGhost + n + g] = u[g];
        } else {
            ext[kGhost - 1 - g] = u[0];
            ext[kGhost + n + g] = u[n - 1];
        }
    }
}

} // namespace

double weno5_face(const double* f) {
    const double f0 = f[0], f1 = f[1], f2 = f[2], f3 = f[3], f4 = f[4];

    // Candidate three-point interpolations of the face value.
    const double q0 = (2.0 * f0 - 7.0 * f1 + 11.0 * f2) / 6.0;
    const double q1 = (-f1 + 5.0 * f2 + 2.0 * f3) / 6.0;
    const double q2 = (2.0 * f2 + 5.0 * f3 - f4) / 6.0;

    // Jiang-Shu smoothness indicators.
    const double d01 = f0 - 2.0 * f1 + f2;
    const double d12 = f1 - 2.0 * f2 + f3;
    const double d23 = f2 - 2.0 * f3 + f4;
    const double b0 = (13.0 / 12.0) * d01 * d01 +
                      0.25 * (f0 - 4.0 * f1 + 3.0 * f2) * (f0 - 4.0 * f1 + 3.0 * f2);
    const double b1 = (13.0 / 12.0) * d12 * d12 + 0.25 * (f1 - f3) * (f1 - f3);
    const double b2 = (13.0 / 12.0) * d23 * d23 +
                      0.25 * (3.0 * f2 - 4.0 * f3 + f4) * (3.0 * f2 - 4.0 * f3 + f4);

    // WENO-Z weights (tau5 enhancement, q = 2).
    const double tau = std::abs(b0 - b2);
    const double t0 = tau / (b0 + kWenoEps);
    const double t1 = tau / (b1 + kWenoEps);
    const double t2 = tau / (b2 + kWenoEps);
    const double a0 = 0.1 * (1.0 + t0 * t0);
    const double a1 = 0.6 * (1.0 + t1 * t1);
    const double a2 = 0.3 * (1.0 + t2 * t2);
    const double inv = 1.0 / (a0 + a1 + a2);
    return inv * (a0 * q0 + a1 * q1 + a2 * q2);
}

void weno5_interface_flux(const double* u, const double* f, std::size_t n,
                          double alpha, LineBc bc, bool zero_boundary_flux,
                          double* fhat) {
    static thread_local std::vector<double> fp, fm;
    fp.resize(n + 2 * kGhost);
    fm.resize(n + 2 * kGhost);

    static thread_local std::vector<double> ue, fe;
    pad_line(u, n, bc, ue);
    pad_line(f, n, bc, fe);
    for (std::size_t i = 0; i < n + 2 * kGhost; ++i) {
        fp[i] = 0.5 * (fe[i] + alpha * ue[i]);
        fm[i] = 0.5 * (fe[i] - alpha * ue[i]);
    }

    // fhat[k] approximates the flux at x_{k-1/2}; window centre is cell k-1
    // for the plus part and cell k for the mirrored minus part.
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t c = k + kGhost - 1; // extended index of cell k-1
        const double wp[5] = {fp[c - 2], fp[c - 1], fp[c], fp[c + 1], fp[c + 2]};
        const double wm[5] = {fm[c + 3], fm[c + 2], fm[c + 1], fm[c], fm[c - 1]};
        fhat[k] = weno5_face(wp) + weno5_face(wm);
    }
    if (zero_boundary_flux) {
        fhat[0] = 0.0;
        fhat[n] = 0.0;
    }
}

std::vector<double> weno5_flux_derivative(const std::vector<double>& line,
                                          const std::function<double(double)>& flux,
                                          double alpha, double dx, LineBc bc,
                                          bool zero_boundary_flux) {
    const std::size_t n = line.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = flux(line[i]);
    std::vector<double> fhat(n + 1);
    weno5_interface_flux(line.data(), f.data(), n, alpha, bc, zero_boundary_flux,
                         fhat.data());
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (fhat[i + 1] - fhat[i]) / dx;
    return d;
}

void weno5_upwind_derivative(const double* q, std::size_t n, int wind_sign,
                             double dx, LineBc bc, double* dq) {
    static thread_local std::vector<double> qe, face;
    pad_line(q, n, bc, qe);
    face.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t c = k + kGhost - 1;
        if (wind_sign >= 0) {
            const double w[5] = {qe[c - 2], qe[c - 1], qe[c], qe[c + 1], qe[c + 2]};
            face[k] = weno5_face(w);
        } else {
            const double w[5] = {qe[c + 3], qe[c + 2], qe[c + 1], qe[c], qe[c - 1]};
            face[k] = weno5_face(w);
        }
    }
    for (std::size_t i = 0; i < n; ++i) dq[i] = (face[i + 1] - face[i]) / dx;
}

std::vector<double> weno5_upwind_derivative(const std::vector<double>& line,
                                            int wind_sign, double dx, LineBc bc) {
    std::vector<double> dq(line.size());
    weno5_upwind_derivative(line.data(), line.size(), wind_sign, dx, bc, dq.data());
    return dq;
}

void upwind1_interface_flux(const double* u, const double* coef, std::size_t n,
                            bool zero_boundary_flux, double* fhat) {
    fhat[0] = zero_boundary_flux ? 0.0 : coef[0] * u[0];
    for (std::size_t k = 1; k <= n; ++k) fhat[k] = coef[k - 1] * u[k - 1];
    if (zero_boundary_flux) fhat[n] = 0.0;
}

void upwind1_gradient(const double* q, std::size_t n, double dx, double* dq) {
    for (std::size_t i = 0; i < n; ++i) {
        const double qr = (i + 1 < n) ? q[i + 1] : q[n - 1];
        dq[i] = (qr - q[i]) / dx;
    }
}

void limit_antidiffusive(const double* dflux, const double* budget,
                         std::size_t n, double dt_over_dx, double* theta) {
    static thread_local std::vector<double> ratio;
    ratio.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (budget[i] < -1e-12)
            throw StabilityError("bound-preserving limiter: low-order update went negative "
                                 "(CFL condition violated)");
        const double drain = dt_over_dx * (std::max(dflux[i + 1], 0.0) +
                                           std::max(-dflux[i], 0.0));
        ratio[i] = (drain <= std::max(budget[i], 0.0)) ? 1.0
                                                       : std::max(budget[i], 0.0) / drain;
    }
    for (std::size_t k = 0; k <= n; ++k) {
        double th = 1.0;
        if (dflux[k] > 0.0 && k > 0) th = std::min(th, ratio[k - 1]);
        if (dflux[k] < 0.0 && k < n) th = std::min(th, ratio[k]);
        theta[k] = th;
    }
}

std::vector<double> apply_bp_limiter(const std::vector<double>& high_flux,
                                     const std::vector<double>& low_flux,
                                     const std::vector<double>& cell_values,
                                     double dt_over_dx) {
    const std::size_t n = cell_values.size();
    if (high_flux.size() != n + 1 || low_flux.size() != n + 1)
        throw ConfigError("apply_bp_limiter: flux arrays must have n+1 entries");

    std::vector<double> budget(n), dflux(n + 1), theta(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        budget[i] = cell_values[i] - dt_over_dx * (low_flux[i + 1] - low_flux[i]);
    for (std::size_t k = 0; k <= n; ++k) dflux[k] = high_flux[k] - low_flux[k];
    limit_antidiffusive(dflux.data(), budget.data(), n, dt_over_dx, theta.data());

    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = low_flux[k] + theta[k] * dflux[k];
    return out;
}

std::vector<double> central_diffusion_product(const std::vector<double>& line,
                                              const std::vector<double>& coeff,
                                              double dx) {
    const std::size_t n = line.size();
    std::vector<double> m(n), out(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = coeff[i] * line[i];
    // Flux form with zero diffusive flux through the walls.
    const double inv = 1.0 / (dx * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const double g_hi = (i + 1 < n) ? (m[i + 1] - m[i]) : 0.0;
        const double g_lo = (i > 0) ? (m[i] - m[i - 1]) : 0.0;
        out[i] = (g_hi - g_lo) * inv;
    }
    return out;
}

std::vector<double> central_diffusion_coeff(const std::vector<double>& line,
                                            const std::vector<double>& coeff,
                                            double dx) {
    const std::size_t n = line.size();
    std::vector<double> out(n);
    const double inv = 1.0 / (dx * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const double ql = (i > 0) ? line[i - 1] : line[0];
        const double qr = (i + 1 < n) ? line[i + 1] : line[n - 1];
        out[i] = coeff[i] * (qr - 2.0 * line[i] + ql) * inv;
    }
    return out;
}

} // namespace fpimpulse
