#pragma once

#include <cstddef>
#include <vector>

namespace fpimpulse {

// Uniform node-centred grid on (0, w_max) x (0, 1), including the boundary
// nodes: w_i = i dw, z_j = j dz.
struct Grid2D {
    double w_max = 5.3;
    std::size_t n_w = 201;
    std::size_t n_z = 201;

    double dw() const { return w_max / static_cast<double>(n_w - 1); }
    double dz() const { return 1.0 / static_cast<double>(n_z - 1); }
    double w(std::size_t i) const { return static_cast<double>(i) * dw(); }
    double z(std::size_t j) const { return static_cast<double>(j) * dz(); }

    bool operator==(const Grid2D&) const = default;

    void validate(const char* field_prefix = "grid") const;
};

// Gridded scalar field over (w, z); z is the contiguous index.
struct Field2D {
    Grid2D grid;
    std::vector<double> v;

    Field2D() = default;
    explicit Field2D(const Grid2D& g) : grid(g), v(g.n_w * g.n_z, 0.0) {}

    double& at(std::size_t iw, std::size_t iz) { return v[iw * grid.n_z + iz]; }
    double at(std::size_t iw, std::size_t iz) const { return v[iw * grid.n_z + iz]; }
    std::size_t size() const { return v.size(); }
};

// Trapezoidal double integral over the full domain.
double integrate(const Field2D& field);

// z-marginal per w-row: ybar(w_i) = integral of field(w_i, .) over z.
std::vector<double> conditional_density(const Field2D& field);

// Integral over (w_lo, w_hi) x (0, 1); fractional end cells are handled by
// integrating the piecewise-linear interpolant of the z-marginal exactly.
double window_integral(const Field2D& field, double w_lo, double w_hi);

double min_value(const Field2D& field);
double max_abs(const Field2D& field);
bool all_finite(const Field2D& field);

// Trapezoidal integral of a 1-D array of node values with spacing dx.
double trapezoid(const std::vector<double>& values, double dx);

} // namespace fpimpulse
