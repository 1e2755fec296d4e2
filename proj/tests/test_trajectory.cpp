#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mfl/error.hpp"
#include "mfl/trajectory.hpp"

using namespace mfl;

namespace {

GridDensity random_density(const TorusGrid& g, std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(0.4, 1.8);
    std::vector<double> v(g.size());
    for (auto& x : v)
        x = u(gen);
    return GridDensity::normalize(g, v);
}

TrajectoryProblem random_problem(const TorusGrid& g, int T, Variant v, std::mt19937_64& gen)
{
    TrajectoryProblem p;
    p.T = T;
    p.tau = 0.2;
    p.sigma = 0.02;
    p.variant = v;
    for (int i = 0; i <= T; ++i)
        p.observations.push_back(random_density(g, gen));
    return p;
}

SinkhornOptions tight() { return {1e-14, 20000, nullptr}; }

} // namespace

TEST_CASE("problem validation")
{
    TorusGrid g(1, 16);
    TrajectoryProblem p;
    p.T = 2;
    p.observations.assign(2, GridDensity::uniform(g));
    CHECK_THROWS_AS(p.validate(), Error);
    p.observations.push_back(GridDensity::uniform(g));
    CHECK_NOTHROW(p.validate());
    p.tau = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.tau = 0.1;
    p.sigma = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK(parse_variant(variant_name(Variant::debiased)) == Variant::debiased);
    CHECK_THROWS_AS(parse_variant("other"), Error);
}

TEST_CASE("uniform chain has zero objective")
{
    TorusGrid g(1, 32);
    TrajectoryProblem p;
    p.T = 1;
    p.tau = 0.1;
    p.observations.assign(2, GridDensity::uniform(g));
    ChainObjective obj(p);
    auto e = obj.evaluate(obj.uniform_chain());
    CHECK(std::abs(e.value) < 1e-12);
    for (const auto& f : e.fv)
        CHECK(f.max_abs() < 1e-10);
}

TEST_CASE("variants differ by the endpoint entropies")
{
    TorusGrid g(1, 32);
    std::mt19937_64 gen(1);
    for (int T : {1, 3}) {
        auto ps = random_problem(g, T, Variant::standard, gen);
        auto pd = ps;
        pd.variant = Variant::debiased;
        ChainObjective s(ps), d(pd);
        CHECK(d.diffusivities().front() == doctest::Approx(0.5 * ps.tau));
        for (int k = 0; k < 4; ++k) {
            Chain c;
            for (int i = 0; i <= T; ++i)
                c.push_back(random_density(g, gen));
            auto es = s.evaluate(c), ed = d.evaluate(c);
            double term = 0.5 * ps.tau * (entropy(c.front()) + entropy(c.back()));
            CHECK(std::abs(es.value - ed.value - term) < 1e-12);
        }
    }
}

TEST_CASE("marginal first variations")
{
    TorusGrid g(1, 32);
    std::mt19937_64 gen(2);
    for (Variant v : {Variant::standard, Variant::debiased}) {
        auto p = random_problem(g, 3, v, gen);
        ChainObjective obj(p, tight());
        Chain c, dir;
        for (int i = 0; i <= p.T; ++i) {
            c.push_back(random_density(g, gen));
            dir.push_back(random_density(g, gen));
        }
        auto E = obj.evaluate(c);
        for (int i = 0; i <= p.T; ++i) {
            CAPTURE(i);
            const double e = 1e-4;
            double dd = 0.0;
            std::vector<double> a(g.size()), b(g.size());
            for (std::size_t j = 0; j < g.size(); ++j) {
                double s = dir[i][j] - c[i][j];
                dd += E.fv[i][j] * s * g.h();
                a[j] = c[i][j] + e * s;
                b[j] = c[i][j] - e * s;
            }
            Chain ca = c, cb = c;
            ca[i] = GridDensity::adopt(g, a, 1e-9);
            cb[i] = GridDensity::adopt(g, b, 1e-9);
            double fd = (obj.value(ca) - obj.value(cb)) / (2 * e);
            CHECK(fd == doctest::Approx(dd).epsilon(1e-4));
        }
    }
}

TEST_CASE("convexity of the standard objective")
{
    TorusGrid g(1, 32);
    std::mt19937_64 gen(3);
    auto p = random_problem(g, 2, Variant::standard, gen);
    ChainObjective obj(p, tight());
    for (int k = 0; k < 10; ++k) {
        Chain a, b;
        for (int i = 0; i <= p.T; ++i) {
            a.push_back(random_density(g, gen));
            b.push_back(random_density(g, gen));
        }
        auto Ea = obj.evaluate(a);
        double lin = 0.0;
        for (int i = 0; i <= p.T; ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                lin += Ea.fv[i][j] * (b[i][j] - a[i][j]) * g.h();
        CHECK(obj.value(b) >= Ea.value + lin - 1e-9);
    }
}

TEST_CASE("problem file round trip")
{
    TorusGrid g(1, 16);
    std::mt19937_64 gen(4);
    auto p = random_problem(g, 2, Variant::debiased, gen);
    const std::string path = "test_trajectory_problem.txt";
    write_problem(path, p);
    auto q = read_problem(path);
    std::remove(path.c_str());
    CHECK(q.T == 2);
    CHECK(q.variant == Variant::debiased);
    CHECK(q.sigma == p.sigma);
    CHECK(q.tau == p.tau);
    for (int i = 0; i <= 2; ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            CHECK(q.observations[i][j] == doctest::Approx(p.observations[i][j]).epsilon(1e-15));
    CHECK_THROWS_AS(read_problem("does/not/exist"), Error);
}

TEST_CASE("synthetic observations")
{
    TorusGrid g(1, 64);
    GridFunction zero(g);
    auto a = generate_synthetic(zero, 0.1, 2, 1000, 0.01, 5);
    auto b = generate_synthetic(zero, 0.1, 2, 1000, 0.01, 5);
    CHECK(a.observations.size() == 3);
    for (int i = 0; i <= 2; ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            CHECK(a.observations[i][j] == b.observations[i][j]);
    auto u = GridDensity::uniform(g);
    auto big = generate_synthetic(zero, 0.1, 2, 100000, 0.01, 5);
    for (int i = 0; i <= 2; ++i) {
        CHECK(w1_circle(a.observations[i], u) < 0.05);
        CHECK(w1_circle(big.observations[i], u) <= 0.5 * w1_circle(a.observations[i], u));
    }
    CHECK_THROWS_AS(generate_synthetic(zero, 0.1, 2, 50, 0.01, 5), Error);
}

TEST_CASE("coupled flow decreases and fits the observations")
{
    TorusGrid g(1, 64);
    auto V = GridFunction::tabulate(g, [](const Point& x) { return 0.5 * std::cos(2 * M_PI * x[0]); });
    // start from the stationary law so every snapshot samples the same Gibbs density
    auto gibbs = gibbs_density(V, 0.1);
    std::vector<double> cdf(g.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        cdf[j] = (acc += gibbs[j] * g.h());
    InitialLaw stationary = [&](std::uint64_t k, double* x) {
        std::mt19937_64 r(k + 1);
        double u = std::uniform_real_distribution<double>(0, 1)(r);
        std::size_t j = std::lower_bound(cdf.begin(), cdf.end(), u * acc) - cdf.begin();
        x[0] = (double(j) + std::uniform_real_distribution<double>(-0.5, 0.5)(r)) * g.h();
    };
    auto p = generate_synthetic(V, 0.1, 4, 10000, 0.01, 1, stationary);
    p.tau = 0.05;
    ChainObjective obj(p);
    FlowConfig cfg;
    cfg.t_end = 3.0;
    cfg.record_every = 0.1;
    cfg.scheme = Scheme::fv_sg;
    auto tr = coupled_flow(obj, obj.uniform_chain(), cfg);
    for (std::size_t k = 1; k < tr.rows.size(); ++k)
        CHECK(tr.rows[k].flow.F <= tr.rows[k - 1].flow.F + 1e-12);
    for (int i = 0; i <= p.T; ++i) {
        CAPTURE(i);
        CHECK(w1_circle(tr.final_chain[i], p.observations[i]) <= 2e-2);
    }
}
