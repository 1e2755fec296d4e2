// Serial reference vs OpenMP path for each kernel. Arg 0 selects the path.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfl/kernels.hpp"

using namespace mfl;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

std::vector<double> random_values(std::size_t n, double lo, double hi, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(gen);
    return v;
}

void BM_sum(benchmark::State& s)
{
    auto x = random_values(std::size_t(s.range(1)), -1, 1, 1);
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::sum(exec_of(s), x.data(), x.size()));
    s.SetItemsProcessed(s.iterations() * s.range(1));
}

void BM_fv_update(benchmark::State& s)
{
    TorusGrid g(2, int(s.range(1)));
    auto mu = random_values(g.size(), 0.5, 1.5, 2);
    std::vector<double> P(g.size()), out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        P[i] = 0.3 * std::cos(2 * M_PI * g.point(i)[0]);
    const double dt = 0.1 * g.h() * g.h();
    for (auto _ : s) {
        kernels::fv_update(exec_of(s), g, kernels::FluxScheme::exponential_fit, mu.data(), P.data(), 1.0, dt,
                           out.data());
        benchmark::ClobberMemory();
    }
    s.SetItemsProcessed(s.iterations() * std::int64_t(g.size()));
}

void BM_direct_convolution(benchmark::State& s)
{
    TorusGrid g(1, int(s.range(1)));
    auto f = random_values(g.size(), 0, 1, 3), k = random_values(g.size(), -1, 1, 4);
    std::vector<double> out(g.size());
    for (auto _ : s) {
        kernels::direct_convolution(exec_of(s), g, f.data(), k.data(), out.data());
        benchmark::ClobberMemory();
    }
    s.SetItemsProcessed(s.iterations() * std::int64_t(g.size() * g.size()));
}

void BM_deposit_ngp(benchmark::State& s)
{
    TorusGrid g(1, 256);
    auto pos = random_values(std::size_t(s.range(1)), 0, 1, 5);
    std::vector<std::uint64_t> counts(g.size());
    for (auto _ : s) {
        kernels::deposit_ngp(exec_of(s), g, pos.data(), pos.size(), counts.data());
        benchmark::ClobberMemory();
    }
    s.SetItemsProcessed(s.iterations() * s.range(1));
}

void BM_langevin_torus_step(benchmark::State& s)
{
    TorusGrid g(1, 128);
    std::vector<double> drift(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        drift[i] = std::sin(2 * M_PI * g.point(i)[0]);
    const double* fields[] = {drift.data()};
    auto pos = random_values(std::size_t(s.range(1)), 0, 1, 6);
    std::uint64_t step = 0;
    for (auto _ : s)
        kernels::langevin_torus_step(exec_of(s), g, fields, 0.5, 1e-3, 7, step++, pos.data(), pos.size());
    s.SetItemsProcessed(s.iterations() * s.range(1));
}

void BM_line_sde_step(benchmark::State& s)
{
    kernels::LineDrift b = [](double, const double* x, int) { return 0.5 * std::sin(2 * M_PI * x[0]); };
    auto pos = random_values(std::size_t(s.range(1)), -1, 1, 8);
    std::uint64_t step = 0;
    for (auto _ : s)
        kernels::line_sde_step(exec_of(s), 1, b, 1.0, 0.0, 1e-3, 9, step++, pos.data(), pos.size());
    s.SetItemsProcessed(s.iterations() * s.range(1));
}

} // namespace

BENCHMARK(BM_sum)->ArgsProduct({{0, 1}, {1 << 16, 1 << 22}});
BENCHMARK(BM_fv_update)->ArgsProduct({{0, 1}, {64, 256}});
BENCHMARK(BM_direct_convolution)->ArgsProduct({{0, 1}, {256, 1024}});
BENCHMARK(BM_deposit_ngp)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});
BENCHMARK(BM_langevin_torus_step)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});
BENCHMARK(BM_line_sde_step)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});

BENCHMARK_MAIN();
