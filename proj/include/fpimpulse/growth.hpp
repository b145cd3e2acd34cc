#pragma once

#include <cstdint>
#include <vector>

namespace fpimpulse {

// Parameters of one habitat's stochastic growth law for the log-weight W and
// the latent weight-to-maximum ratio Z:
//   dW = r (1 - Z) dt,   dZ = D (1 - Z) dt + sigma sqrt(Z (1 - Z)) dB.
struct GrowthParams {
    double r = 0.051;       // specific growth rate, 1/day
    double d_relax = 0.019; // relaxation rate D, 1/day
    double sigma = 0.051;   // noise intensity, 1/day^(1/2)
    double x0 = 6.0;        // initial body weight, g
    double z0 = 0.02;       // initial ratio, dimensionless

    double w0() const; // ln x0

    // Throws ConfigError on violation. sigma = 0 is accepted as the
    // deterministic limit; 2 D >= sigma^2 keeps z = 0 unattainable.
    void validate(const char* field_prefix = "growth") const;
};

// Which drift/diffusion pair drives Z.
//  Proposed: A(z) = D (1 - z),                      C(z) = sigma sqrt(z (1 - z))
//  Legacy:   A(z) = z (1 - z) (r + D + sigma^2 (1 - z)), C(z) = sigma z (1 - z)
enum class ModelKind { Proposed, Legacy };

// Per-path samples of (w, z) at the requested times.
struct PathEnsemble {
    std::vector<double> times;     // sample times, day
    std::size_t n_paths = 0;
    std::vector<double> w_samples; // [time][path], flattened
    std::vector<double> z_samples; // [time][path], flattened
    std::uint64_t seed = 0;

    double w(std::size_t time_index, std::size_t path) const {
        return w_samples[time_index * n_paths + path];
    }
    double z(std::size_t time_index, std::size_t path) const {
        return z_samples[time_index * n_paths + path];
    }
};

struct SampleStats {
    double average = 0.0;  // g
    double std_dev = 0.0;  // g, population convention
    double skewness = 0.0; // third standardized moment m3 / m2^(3/2)
};

// One Euler step of the log-weight drift: w + r (1 - z) dt.
double step_w(double w, double z, double dt, const GrowthParams& params);

// One bounded step of Z. The linear drift is advanced exactly over dt, then
// the diffusion increment is applied with the noise coefficient frozen at the
// drifted point. Increments that would leave [0, 1] are mapped through the
// trigonometric (sin^2) update instead, which respects the bounds for every
// draw; a |violation| < 1e-14 clamp guards floating-point dust. The one-step
// mean matches A(z) dt to first order.
double step_z_bounded(double z, double dt, const GrowthParams& params,
                      double gaussian, ModelKind kind = ModelKind::Proposed);

// Monte-Carlo simulation with per-path RNG substreams keyed by (seed, path).
// Reruns with equal arguments are bit-identical regardless of threading.
PathEnsemble simulate_paths(const GrowthParams& params, ModelKind kind,
                            const std::vector<double>& sample_times, double dt,
                            std::size_t n_paths, std::uint64_t seed);

// Statistics of the body weight X = exp(w) across paths at one sample time.
// Throws std::domain_error when the sample is degenerate (zero std-dev).
SampleStats stats_at(const PathEnsemble& ensemble, std::size_t time_index);

// Mean body weight E[X_t] at every sample time (compensated summation).
std::vector<double> mean_weight_curve(const PathEnsemble& ensemble);

} // namespace fpimpulse
