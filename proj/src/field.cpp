#include "fpimpulse/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpimpulse/errors.hpp"

namespace fpimpulse {

void Grid2D::validate(const char* field_prefix) const {
    const std::string pfx = field_prefix;
    if (n_w < 11 || n_z < 11)
        throw ConfigError(pfx + ": node counts must be >= 11 (WENO stencil plus boundaries)");
    if (!(w_max > 0.0) || !std::isfinite(w_max))
        throw ConfigError(pfx + ".w_max: must be > 0");
}

double trapezoid(const std::vector<double>& values, double dx) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    double comp = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double t = sum + values[i];
        comp += (std::abs(sum) >= std::abs(values[i])) ? (sum - t) + values[i]
                                                       : (values[i] - t) + sum;
        sum = t;
    }
    return (sum + comp) * dx;
}

std::vector<double> conditional_density(const Field2D& field) {
    const std::size_t n_w = field.grid.n_w;
    const std::size_t n_z = field.grid.n_z;
    const double dz = field.grid.dz();
    std::vector<double> ybar(n_w);
    for (std::size_t i = 0; i < n_w; ++i) {
        const double* row = &field.v[i * n_z];
        double sum = 0.5 * (row[0] + row[n_z - 1]);
        for (std::size_t j = 1; j + 1 < n_z; ++j) sum += row[j];
        ybar[i] = sum * dz;
    }
    return ybar;
}

double integrate(const Field2D& field) {
    return trapezoid(conditional_density(field), field.grid.dw());
}

double window_integral(const Field2D& field, double w_lo, double w_hi) {
    const double w_max = field.grid.w_max;
    if (!(w_lo >= 0.0 && w_lo < w_hi && w_hi <= w_max + 1e-12))
        throw ConfigError("window: must satisfy 0 <= w_lo < w_hi <= w_max");
    w_hi = std::min(w_hi, w_max);

    const std::vector<double> g = conditional_density(field);
    const double dw = field.grid.dw();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double cell_lo = static_cast<double>(i) * dw;
        const double cell_hi = cell_lo + dw;
        const double a = std::max(cell_lo, w_lo);
        const double b = std::min(cell_hi, w_hi);
        if (b <= a) continue;
        const double slope = (g[i + 1] - g[i]) / dw;
        const double ga = g[i] + slope * (a - cell_lo);
        const double gb = g[i] + slope * (b - cell_lo);
        total += 0.5 * (ga + gb) * (b - a);
    }
    return total;
}

double min_value(const Field2D& field) {
    return *std::min_element(field.v.begin(), field.v.end());
}

double max_abs(const Field2D& field) {
    double m = 0.0;
    for (double x : field.v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(const Field2D& field) {
    for (double x : field.v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace fpimpulse
