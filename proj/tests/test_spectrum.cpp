#include "doctest.h"

#include <cmath>
#include <random>

#include "mfl/error.hpp"
#include "mfl/functionals.hpp"
#include "mfl/spectrum.hpp"

using namespace mfl;

namespace {

GridFunction cosine(const TorusGrid& g, double a)
{
    return GridFunction::tabulate(g, [a](const Point& x) { return a * std::cos(2 * M_PI * x[0]); });
}

// direct quadrature of int W(z) cos(2 pi k z) dz
double quadrature_coefficient(const GridFunction& W, int k)
{
    const TorusGrid& g = W.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        s += W[i] * std::cos(2 * M_PI * k * g.point(i)[0]) * g.h();
    return s;
}

} // namespace

TEST_CASE("spectra of elementary kernels")
{
    TorusGrid g(1, 32);
    auto zero = kernel_spectrum(GridFunction(g));
    CHECK(zero.threshold == 0.0);

    auto pos = kernel_spectrum(cosine(g, 1.0));
    CHECK(pos.coefficient(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pos.coefficient(-1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pos.coefficient(1) == doctest::Approx(quadrature_coefficient(cosine(g, 1.0), 1)).epsilon(1e-12));
    CHECK(pos.threshold == 0.0);

    auto neg = kernel_spectrum(cosine(g, -1.0));
    CHECK(neg.coefficient(1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(interaction_tau_threshold(neg) == doctest::Approx(4.0).epsilon(1e-12));
    for (double kappa : {0.1, 0.5})
        CHECK(interaction_tau_threshold(kernel_spectrum(cosine(g, -kappa))) == doctest::Approx(4 * kappa).epsilon(1e-12));

    auto odd = GridFunction::tabulate(g, [](const Point& x) { return std::sin(2 * M_PI * x[0]); });
    CHECK_THROWS_AS(kernel_spectrum(odd), Error);
}

TEST_CASE("lipschitz bound")
{
    CHECK(lipschitz_tau_bound(0.0, TorusGrid(1, 8)) == 0.0);
    CHECK(lipschitz_tau_bound(4.0, TorusGrid(1, 8)) == doctest::Approx(1.0));
    CHECK(lipschitz_tau_bound(4.0, TorusGrid(2, 8)) == doctest::Approx(2.0));
    auto c = lipschitz_certificate(4.0, TorusGrid(2, 8));
    CHECK(c.source == "lipschitz");
    CHECK(c.diameter == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("reconstruction, split and scaling")
{
    std::mt19937_64 gen(6);
    std::normal_distribution<double> z;
    for (int d : {1, 2}) {
        TorusGrid g(d, 16);
        // random even kernel built from even modes
        GridFunction W(g);
        for (int k1 = 0; k1 <= 4; ++k1)
            for (int k2 = 0; k2 <= (d == 2 ? 4 : 0); ++k2) {
                double a = z(gen);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    auto p = g.point(i);
                    W[i] += a * std::cos(2 * M_PI * k1 * p[0]) * std::cos(2 * M_PI * k2 * p[1]);
                }
            }
        auto s = kernel_spectrum(W);
        CHECK(s.max_imag < 1e-10);
        auto back = reconstruct_kernel(s);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(back[i] - W[i]) < 1e-10);

        auto sp = split_kernel(s);
        auto sum = sp.plus - sp.minus;
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(sp.mean + sum[i] - W[i]) < 1e-10);
        for (const auto* part : {&sp.plus, &sp.minus}) {
            auto ps = kernel_spectrum(*part);
            for (double c : ps.coefficients)
                CHECK(c > -1e-10);
        }
        auto scaled = W;
        scaled *= 2.5;
        CHECK(interaction_tau_threshold(kernel_spectrum(scaled)) ==
              doctest::Approx(2.5 * s.threshold).epsilon(1e-12));
    }
}

TEST_CASE("the Fourier threshold certifies convexity")
{
    TorusGrid g(1, 32);
    auto W = GridFunction::tabulate(g, [](const Point& x) {
        return -0.3 * std::cos(2 * M_PI * x[0]) + 0.2 * std::cos(4 * M_PI * x[0]) - 0.1 * std::cos(6 * M_PI * x[0]);
    });
    auto cert = fourier_certificate(kernel_spectrum(W));
    CHECK(cert.source == "fourier");
    CHECK(cert.tau_bound == doctest::Approx(4 * 2 * (0.15 + 0.05)).epsilon(1e-12));
    Objective F({std::make_shared<InteractionEnergy>(W)}, cert.tau_bound);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> a(g.size()), b(g.size());
        for (auto& x : a)
            x = u(gen);
        for (auto& x : b)
            x = u(gen);
        auto mu = GridDensity::normalize(g, a), nu = GridDensity::normalize(g, b);
        auto fv = F.first_variation(mu);
        double lin = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            lin += fv[i] * (nu[i] - mu[i]) * g.h();
        CHECK(F.value(nu) - F.value(mu) - lin >= -1e-8);
    }
}
