#include <cmath>

#include "doctest.h"
#include "fpimpulse/errors.hpp"
#include "fpimpulse/field.hpp"

using namespace fpimpulse;

namespace {

Field2D filled(const Grid2D& g, double (*f)(double, double)) {
    Field2D out(g);
    for (std::size_t i = 0; i < g.n_w; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j) out.at(i, j) = f(g.w(i), g.z(j));
    return out;
}

} // namespace

TEST_CASE("integrate: constants and separable products") {
    Grid2D g{5.3, 21, 21};
    CHECK(integrate(filled(g, [](double, double) { return 1.0; })) ==
          doctest::Approx(5.3).epsilon(1e-12));
    CHECK(integrate(Field2D(g)) == doctest::Approx(0.0));

    Grid2D unit{1.0, 201, 201};
    // Exact separable integral of w z over the unit square is 1/4; the
    // trapezoid rule is exact for bilinear data.
    CHECK(integrate(filled(unit, [](double w, double z) { return w * z; })) ==
          doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("conditional_density marginalizes z") {
    Grid2D g{2.0, 41, 31};
    const Field2D a = filled(g, [](double w, double) { return std::sin(w); });
    const auto ybar_a = conditional_density(a);
    for (std::size_t i = 0; i < g.n_w; ++i)
        CHECK(ybar_a[i] == doctest::Approx(std::sin(g.w(i))).epsilon(1e-12));

    CHECK(conditional_density(Field2D(g))[17] == doctest::Approx(0.0));

    const Field2D b = filled(g, [](double w, double z) { return z * std::cos(w); });
    const auto ybar_b = conditional_density(b);
    for (std::size_t i = 0; i < g.n_w; ++i)
        CHECK(ybar_b[i] == doctest::Approx(0.5 * std::cos(g.w(i))).epsilon(1e-10));
}

TEST_CASE("window_integral") {
    Grid2D g{5.3, 201, 51};
    const Field2D ones = filled(g, [](double, double) { return 1.0; });

    CHECK(window_integral(ones, 0.0, g.w_max) ==
          doctest::Approx(integrate(ones)).epsilon(1e-12));
    CHECK(window_integral(ones, 0.3 * 5.3, 0.7 * 5.3) ==
          doctest::Approx(2.12).epsilon(1e-12));
    CHECK_THROWS_AS((void)window_integral(ones, 2.0, 1.0), ConfigError);

    // Indicator-of-window field vs. the window width: at most one cell of
    // smearing on each side.
    const double w_lo = 1.273, w_hi = 3.641;
    Field2D ind(g);
    for (std::size_t i = 0; i < g.n_w; ++i)
        if (g.w(i) >= w_lo && g.w(i) <= w_hi)
            for (std::size_t j = 0; j < g.n_z; ++j) ind.at(i, j) = 1.0;
    const double direct = window_integral(ind, w_lo, w_hi);
    CHECK(std::abs(direct - (w_hi - w_lo)) <= 2.0 * g.dw());
}

TEST_CASE("grid validation") {
    Grid2D tiny{1.0, 5, 21};
    CHECK_THROWS_AS(tiny.validate(), ConfigError);
    Grid2D bad{-1.0, 21, 21};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
