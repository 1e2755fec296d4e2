#include "doctest.h"

#include <cmath>
#include <random>

#include "mfl/error.hpp"
#include "mfl/theory.hpp"

using namespace mfl;
using namespace mfl::theory;

namespace {

double heat(double t, double r, int d) { return std::pow(2 * M_PI * t, -0.5 * d) * std::exp(-r * r / (2 * t)); }

} // namespace

TEST_CASE("R^d kernel bounds")
{
    auto e0 = kernel_bounds_rd(0.0, 1);
    for (double t : {0.1, 0.5})
        for (double y : {0.0, 0.3, 1.0}) {
            CHECK(e0.lower(t, {0.0}, {y}) == doctest::Approx(heat(t, y, 1) / std::sqrt(2.0)).epsilon(1e-14));
            CHECK(e0.upper(t, {0.0}, {y}) == doctest::Approx(heat(t, y, 1) * std::sqrt(2.0)).epsilon(1e-14));
        }
    // d = 1, Mbar = 1, t = 1/4, x = y: 2^{-1/2} (pi/2)^{-1/2} e^{-(2 sqrt t)^2 - t}
    auto e1 = kernel_bounds_rd(1.0, 1);
    double oracle = std::pow(2.0, -0.5) * std::pow(M_PI / 2, -0.5) * std::exp(-1.0 - 0.25);
    CHECK(e1.lower(0.25, {0.4}, {0.4}) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.161643).epsilon(1e-5));

    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-2, 2), ut(0.01, 2.0);
    for (int d : {1, 2}) {
        auto e = kernel_bounds_rd(0.7, d);
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> x(d), y(d);
            for (int a = 0; a < d; ++a) {
                x[a] = u(gen);
                y[a] = u(gen);
            }
            double t = ut(gen);
            CHECK(e.lower(t, x, y) <= e.upper(t, x, y));
        }
    }
}

TEST_CASE("torus kernel constants")
{
    auto k = kernel_bounds_td(1.0, 1);
    CHECK(k.t_star == doctest::Approx(0.125));
    CHECK(k.lower == doctest::Approx(0.014875).epsilon(1e-4));
    CHECK(k.upper == 8.0);
    CHECK(kernel_bounds_td(std::sqrt(1.0 / 8), 1).t_star == doctest::Approx(1.0));
    CHECK(kernel_bounds_td(0.2, 1).t_star == 1.0);
    CHECK(kernel_bounds_td(0.8, 2).lower == doctest::Approx(std::exp(-3 * 0.64) / 45).epsilon(1e-14));
}

TEST_CASE("density envelope and compact rates")
{
    auto e = torus_density_envelope(2.0, 1.0, 1);
    CHECK(e.m == doctest::Approx(0.042072).epsilon(1e-5));
    CHECK(e.M == doctest::Approx(22.6274).epsilon(1e-5));
    CHECK(e.t0 == doctest::Approx(1.0 / 16));
    for (double r : {1.0, 1.5, 3.0})
        for (int d : {1, 2}) {
            auto f = torus_density_envelope(r * 0.4, 0.4, d);
            CHECK(f.m <= 1.0);
            CHECK(f.M >= 1.0);
        }
    CHECK_THROWS_AS(torus_density_envelope(0.5, 1.0, 1), Error);

    auto c = compact_rates(e.m, e.M, 1.5, 1.0, 1);
    CHECK(c.c1 == doctest::Approx(0.14683).epsilon(1e-4));
    CHECK(c.c2 == doctest::Approx(8.11e-4).epsilon(1e-3));
    CHECK(c.regime == Regime::exponential);
    // c1, c2 in terms of the Poincare constant C_P = 1/(2 pi)
    CHECK(c.c1 == doctest::Approx(2 * e.m / (e.M * c.C_P * c.C_P)).epsilon(1e-12));
    CHECK(c.c2 == doctest::Approx(e.m / (4 * e.M * e.M * c.C_P * c.C_P)).epsilon(1e-12));
    CHECK(c.rate == doctest::Approx(0.5 * c.c1).epsilon(1e-12));
    auto c2 = compact_rates(e.m, e.M, 2.0, 1.0, 1);
    CHECK(c2.rate == doctest::Approx(2 * c.rate).epsilon(1e-12));
    auto at = compact_rates(e.m, e.M, 1.0, 1.0, 1);
    CHECK(at.regime == Regime::reciprocal);
    CHECK(at.rate == doctest::Approx(at.c2).epsilon(1e-12));
    CHECK_THROWS_AS(compact_rates(e.m, e.M, 0.9, 1.0, 1), Error);
    CHECK(parse_regime(regime_name(Regime::power)) == Regime::power);
}

TEST_CASE("Gaussian comparison constants")
{
    CHECK(variance_change_constant(1.0, 1.0, 3.0, 2) == doctest::Approx(1.0));
    CHECK(variance_change_constant(std::sqrt(0.75), 1.0, 2.0, 1) == doctest::Approx(1.0299).epsilon(1e-4));
    CHECK_THROWS_AS(variance_change_constant(0.5, 1.0, 2.0, 1), Error);
    CHECK(poly_constant(1.0, 1.0, 3) == doctest::Approx(1.0));
    CHECK(poly_constant(1.0, std::sqrt(1.5), 2) == doctest::Approx(4.0 / 3).epsilon(1e-12));
    CHECK_THROWS_AS(poly_constant(1.0, std::sqrt(2.0), 1), Error);
    double prev = 0.0;
    for (double a = 1.0; a < 1.99; a += 0.05) {
        double c = poly_constant(1.0, std::sqrt(a), 1);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("sandwich time and burn-in")
{
    auto s = gaussian_sandwich_params(0.1, 2.0, 1.5);
    CHECK(s.T_eps == doctest::Approx(7.3841).epsilon(1e-4));
    CHECK(s.lower_exponent == doctest::Approx(1.1));
    CHECK(s.upper_exponent == doctest::Approx(0.9));
    CHECK(gaussian_sandwich_params(0.05, 2.0, 1.5).T_eps > s.T_eps);
    CHECK_THROWS_AS(gaussian_sandwich_params(0.3, 2.0, 1.5), Error);
    CHECK_THROWS_AS(gaussian_sandwich_params(0.1, 1.0, 1.5), Error);
    CHECK(theorem13_burn_in(1.0, 2.0, 1.0) == doctest::Approx(6.3863).epsilon(1e-4));
}

TEST_CASE("scaling transform")
{
    auto id = scaling_forward(0.0, {0.3, -1.2});
    CHECK(id.time == 0.0);
    CHECK(id.x[1] == doctest::Approx(-1.2));
    CHECK(id.density_factor == 1.0);
    for (double t : {0.1, 1.0, 3.0}) {
        auto f = scaling_forward(t, {0.7});
        CHECK(f.time == doctest::Approx(0.5 * (std::exp(2 * t) - 1)));
        CHECK(f.density_factor == doctest::Approx(std::exp(-t)));
        auto b = scaling_inverse(f.time, f.x);
        CHECK(std::abs(b.time - t) < 1e-14);
        CHECK(std::abs(b.x[0] - 0.7) < 1e-14);
        CHECK(b.density_factor * f.density_factor == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(scaling_forward(-1.0, {0.0}), Error);

    // with no drift the confined bound brackets the Ornstein-Uhlenbeck kernel
    auto env = confined_kernel_bounds(0.0, 1);
    for (double t : {0.2, 1.0})
        for (double x2 : {-0.5, 0.0, 0.8}) {
            const double x1 = 0.3, var = 0.5 * (1 - std::exp(-2 * t));
            double ou = std::exp(-std::pow(x2 - std::exp(-t) * x1, 2) / (2 * var)) / std::sqrt(2 * M_PI * var);
            CHECK(env.lower(t, {x1}, {x2}) == doctest::Approx(ou / std::sqrt(2.0)).epsilon(1e-12));
            CHECK(env.upper(t, {x1}, {x2}) == doctest::Approx(ou * std::sqrt(2.0)).epsilon(1e-12));
        }
}
