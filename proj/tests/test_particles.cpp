#include "doctest.h"

#include <cmath>

#include "mfl/error.hpp"
#include "mfl/functionals.hpp"
#include "mfl/particles.hpp"

using namespace mfl;

namespace {

const kernels::LineDrift zero_drift = [](double, const double*, int) { return 0.0; };

ParticleEnsemble line_ensemble(const InitialLaw& law, std::size_t N)
{
    ParticleEnsemble e;
    e.positions.resize(N);
    for (std::size_t p = 0; p < N; ++p)
        law(p, &e.positions[p]);
    return e;
}

} // namespace

TEST_CASE("Ornstein-Uhlenbeck moments")
{
    SdeOptions o;
    o.N = 100000;
    o.t_end = 0.5;
    o.seed = 3;
    const double x0 = 0.8;
    auto e = simulate_confined_sde(zero_drift, 0.0, point_law({x0}), o);
    double m = 0.0, v = 0.0;
    for (double x : e.positions)
        m += x;
    m /= double(o.N);
    for (double x : e.positions)
        v += (x - m) * (x - m);
    v /= double(o.N - 1);
    const double mean = std::exp(-0.5) * x0, var = 0.5 * (1 - std::exp(-1.0));
    CHECK(std::abs(m - mean) <= 4 * std::sqrt(var / double(o.N)));
    CHECK(std::abs(v - var) <= 4 * var * std::sqrt(2.0 / double(o.N)));

    o.t_end = 4.0;
    o.N = 20000;
    auto late = simulate_confined_sde(zero_drift, 0.0, point_law({0.0}), o);
    double s2 = 0.0;
    for (double x : late.positions)
        s2 += x * x;
    CHECK(s2 / double(o.N) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("determinism and guards")
{
    SdeOptions o;
    o.N = 2000;
    o.t_end = 0.1;
    kernels::LineDrift v = [](double, const double* x, int) { return 0.5 * std::sin(2 * M_PI * x[0]); };
    auto a = simulate_confined_sde(v, 0.5, gaussian_law(1, 0.0, 0.25, 9), o);
    auto b = simulate_confined_sde(v, 0.5, gaussian_law(1, 0.0, 0.25, 9), o);
    CHECK(a.positions == b.positions);
    o.exec = kernels::Exec::serial;
    auto c = simulate_confined_sde(v, 0.5, gaussian_law(1, 0.0, 0.25, 9), o);
    CHECK(a.positions == c.positions);
    o.seed = 2;
    auto d = simulate_confined_sde(v, 0.5, gaussian_law(1, 0.0, 0.25, 9), o);
    CHECK(a.positions != d.positions);

    CHECK_THROWS_AS(simulate_confined_sde(v, 0.25, point_law({0.0}), o), Error);
    o.dt = 1e-2;
    CHECK_THROWS_AS(simulate_confined_sde(v, 0.5, point_law({0.0}), o), Error);
}

TEST_CASE("histogram density")
{
    TorusGrid g(1, 64);
    ParticleEnsemble e;
    e.domain = Domain::torus;
    e.positions.assign(100, 3.2 * g.h());
    auto h = histogram_density(e, g);
    CHECK(h[3] == doctest::Approx(1.0 / g.h()));
    CHECK(h.mass() == doctest::Approx(1.0).epsilon(1e-14));

    MflOptions o;
    o.N = 1000000;
    o.t_end = 0.0;
    Objective none({}, 1.0);
    auto u = simulate_mfl_torus(none, g, uniform_torus_law(1, 5), o);
    auto hu = histogram_density(u.ensemble, g);
    double dev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        dev = std::max(dev, std::abs(hu[i] - 1.0));
    CHECK(dev <= 5.0 / std::sqrt(1e6 * g.h()));
    CHECK(hu.mass() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(histogram_density(line_ensemble(point_law({0.0}), 10), g), Error);
}

TEST_CASE("subgaussian check")
{
    CHECK(subgaussian_check(line_ensemble(point_law({0.0}), 100), 1.0) == 1.0);
    const double M0 = 1.5;
    auto quarter = line_ensemble(gaussian_law(1, 0.0, M0 * M0 / 4, 4), 400000);
    CHECK(subgaussian_check(quarter, M0) == doctest::Approx(1.0 / std::sqrt(0.5)).epsilon(0.01));
    auto full = line_ensemble(gaussian_law(1, 0.0, M0 * M0, 4), 400000);
    CHECK(subgaussian_check(full, M0) > 2.0);
    CHECK_THROWS_AS(subgaussian_check(quarter, 0.0), Error);
}

TEST_CASE("mean-field particles")
{
    TorusGrid g(1, 32);
    MflOptions o;
    o.N = 10000;
    o.t_end = 0.1;
    o.seed = 21;
    auto r = simulate_mfl_torus(Objective({}, 1.0), g, uniform_torus_law(1, 8), o);
    auto h = histogram_density(r.ensemble, g);
    const double expect = double(o.N) / double(g.size());
    double chi2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double c = h[i] * g.h() * double(o.N);
        chi2 += (c - expect) * (c - expect) / expect;
    }
    // 0.5% and 99.5% quantiles of chi-square with 31 degrees of freedom
    CHECK(chi2 > 14.46);
    CHECK(chi2 < 55.0);
    for (double x : r.ensemble.positions) {
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }

    auto V = GridFunction::tabulate(g, [](const Point& x) { return 0.5 * std::cos(2 * M_PI * x[0]); });
    Objective lin({std::make_shared<PotentialEnergy>(V)}, 0.5);
    o.N = 20000;
    o.t_end = 1.5;
    o.record_every = 0.5;
    auto gibbs = gibbs_density(V, 0.5);
    auto s = simulate_mfl_torus(lin, g, uniform_torus_law(1, 8), o);
    CHECK(w1_circle(histogram_density(s.ensemble, g), gibbs) <= 3.0 / std::sqrt(double(o.N)));
    CHECK(s.trace.rows.size() == 4);
    o.seed = 22;
    auto s2 = simulate_mfl_torus(lin, g, uniform_torus_law(1, 8), o);
    CHECK(s2.ensemble.positions != s.ensemble.positions);
    CHECK(s2.trace.rows.back().F == doctest::Approx(s.trace.rows.back().F).epsilon(0.02));
}
