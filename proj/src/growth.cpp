#include "fpimpulse/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fpimpulse/errors.hpp"
#include "fpimpulse/rng.hpp"

namespace fpimpulse {

namespace {

// Exact advance of z' = D (1 - z): z -> 1 - (1 - z) e^{-D dt}.
inline double drift_exact_proposed(double z, double decay) {
    return 1.0 - (1.0 - z) * decay;
}

inline double drift_rate_legacy(double z, const GrowthParams& p) {
    return z * (1.0 - z) * (p.r + p.d_relax + p.sigma * p.sigma * (1.0 - z));
}

// sin^2 update used when the additive increment would leave [0, 1]:
//   z -> sin^2(asin(sqrt(z)) + a xi + b),
// with a chosen so the linearization reproduces the frozen noise scale g and
// b cancelling the Ito drift the transform would otherwise introduce.
inline double trig_bounded_step(double z, double g, double xi) {
    const double s = z * (1.0 - z);
    if (s <= 0.0 || g <= 0.0) return z;
    const double root = std::sqrt(s);
    const double a = 0.5 * g / root;
    double b = -g * g * (1.0 - 2.0 * z) / (8.0 * s * root);
    b = std::clamp(b, -a, a);
    const double phi = std::asin(std::sqrt(z)) + a * xi + b;
    const double sn = std::sin(phi);
    double out = sn * sn;
    if (out < 0.0 && out > -1e-14) out = 0.0;
    if (out > 1.0 && out < 1.0 + 1e-14) out = 1.0;
    return out;
}

struct Stepper {
    double dt;
    double sqrt_dt;
    double decay;   // e^{-D dt}, proposed drift
    double sigma;
    ModelKind kind;
    const GrowthParams* params;

    double step_z(double z, double xi) const {
        double zd;
        double g;
        if (kind == ModelKind::Proposed) {
            zd = drift_exact_proposed(z, decay);
            g = sigma * sqrt_dt * std::sqrt(zd * (1.0 - zd));
        } else {
            zd = z + dt * drift_rate_legacy(z, *params);
            zd = std::clamp(zd, 0.0, 1.0);
            g = sigma * sqrt_dt * zd * (1.0 - zd);
        }
        const double zn = zd + g * xi;
        if (zn >= 0.0 && zn <= 1.0) return zn;
        return trig_bounded_step(zd, g, xi);
    }
};

Stepper make_stepper(const GrowthParams& p, ModelKind kind, double dt) {
    return Stepper{dt, std::sqrt(dt), std::exp(-p.d_relax * dt), p.sigma, kind, &p};
}

} // namespace

double GrowthParams::w0() const { return std::log(x0); }

void GrowthParams::validate(const char* field_prefix) const {
    const std::string pfx = field_prefix;
    auto fail = [&](const std::string& field, const std::string& what) {
        throw ConfigError(pfx + "." + field + ": " + what);
    };
    if (!(r > 0.0) || !std::isfinite(r)) fail("r", "must be > 0");
    if (!(d_relax > 0.0) || !std::isfinite(d_relax)) fail("d_relax", "must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma", "must be >= 0");
    if (!(x0 > 0.0) || !std::isfinite(x0)) fail("x0", "must be > 0");
    if (!(z0 > 0.0 && z0 < 1.0)) fail("z0", "must lie in (0, 1)");
    if (!(2.0 * d_relax >= sigma * sigma))
        fail("sigma", "must satisfy 2 d_relax >= sigma^2");
}

double step_w(double w, double z, double dt, const GrowthParams& params) {
    return w + params.r * (1.0 - z) * dt;
}

double step_z_bounded(double z, double dt, const GrowthParams& params,
                      double gaussian, ModelKind kind) {
    return make_stepper(params, kind, dt).step_z(z, gaussian);
}

PathEnsemble simulate_paths(const GrowthParams& params, ModelKind kind,
                            const std::vector<double>& sample_times, double dt,
                            std::size_t n_paths, std::uint64_t seed) {
    params.validate("params");
    if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
    if (n_paths < 1) throw ConfigError("n_paths: must be >= 1");
    if (sample_times.empty()) throw ConfigError("sample_times: must be nonempty");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!(sample_times[i] > 0.0))
            throw ConfigError("sample_times: entries must be positive");
        if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
            throw ConfigError("sample_times: entries must be increasing");
    }

    // Snap sample times to step boundaries.
    std::vector<std::size_t> sample_steps(sample_times.size());
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const auto idx = static_cast<long long>(std::llround(sample_times[i] / dt));
        if (idx < 1 || std::abs(idx * dt - sample_times[i]) > 0.5 * dt)
            throw ConfigError("sample_times: not representable on the dt grid");
        sample_steps[i] = static_cast<std::size_t>(idx);
    }

    PathEnsemble out;
    out.times = sample_times;
    out.n_paths = n_paths;
    out.seed = seed;
    out.w_samples.resize(sample_times.size() * n_paths);
    out.z_samples.resize(sample_times.size() * n_paths);

    const Stepper stepper = make_stepper(params, kind, dt);
    const double w0 = params.w0();
    const double r_dt = params.r * dt;

#pragma omp parallel for schedule(static)
    for (long long pi = 0; pi < static_cast<long long>(n_paths); ++pi) {
        const auto path = static_cast<std::size_t>(pi);
        GaussianSampler noise(seed, path);
        double z = params.z0;
        double drift_sum = 0.0; // sum of (1 - z_n); w = w0 + r dt * sum
        std::size_t step = 0;
        for (std::size_t si = 0; si < sample_steps.size(); ++si) {
            for (; step < sample_steps[si]; ++step) {
                drift_sum += 1.0 - z;
                z = stepper.step_z(z, noise.next());
            }
            out.w_samples[si * n_paths + path] = w0 + r_dt * drift_sum;
            out.z_samples[si * n_paths + path] = z;
        }
    }
    return out;
}

SampleStats stats_at(const PathEnsemble& ensemble, std::size_t time_index) {
    if (time_index >= ensemble.times.size())
        throw ConfigError("time_index: out of range");
    const std::size_t n = ensemble.n_paths;
    const double* w = &ensemble.w_samples[time_index * n];

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(w[i]);

    // Two-pass moments with Neumaier compensation; population convention.
    auto neumaier_sum = [](const std::vector<double>& v, auto&& f) {
        double sum = 0.0, comp = 0.0;
        for (double vi : v) {
            const double term = f(vi);
            const double t = sum + term;
            comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term
                                                      : (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    };
    const double mean = neumaier_sum(x, [](double v) { return v; }) / double(n);
    const double m2 = neumaier_sum(x, [&](double v) {
                          const double d = v - mean;
                          return d * d;
                      }) / double(n);
    const double m3 = neumaier_sum(x, [&](double v) {
                          const double d = v - mean;
                          return d * d * d;
                      }) / double(n);

    if (m2 <= 0.0)
        throw std::domain_error("stats_at: skewness undefined for zero std-dev sample");

    SampleStats s;
    s.average = mean;
    s.std_dev = std::sqrt(m2);
    s.skewness = m3 / (m2 * std::sqrt(m2));
    return s;
}

std::vector<double> mean_weight_curve(const PathEnsemble& ensemble) {
    std::vector<double> means(ensemble.times.size());
    const std::size_t n = ensemble.n_paths;
    for (std::size_t ti = 0; ti < ensemble.times.size(); ++ti) {
        const double* w = &ensemble.w_samples[ti * n];
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double term = std::exp(w[i]);
            const double t = sum + term;
            comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term
                                                      : (term - t) + sum;
            sum = t;
        }
        means[ti] = (sum + comp) / double(n);
    }
    return means;
}

} // namespace fpimpulse
