#include "mfl/particles.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"

#include "mfl/error.hpp"
#include "mfl/rng.hpp"

namespace mfl {

void ParticleEnsemble::write_csv(const std::string& path) const
{
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    os << (dim == 1 ? "index,x1\n" : "index,x1,x2\n");
    char buf[96];
    for (std::size_t p = 0; p < size(); ++p) {
        if (dim == 1)
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", p, positions[p]);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", p, positions[2 * p], positions[2 * p + 1]);
        os << buf;
    }
}

void ParticleEnsemble::write_metadata(const std::string& path, const std::string& extra_json) const
{
    nlohmann::json j;
    j["dim"] = dim;
    j["domain"] = domain == Domain::line ? "line" : "torus";
    j["N"] = size();
    j["time"] = time;
    j["seed"] = seed;
    j["rng"] = "splitmix64 counter streams keyed by (seed, particle, step)";
    j["parameters"] = nlohmann::json::parse(extra_json);
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    os << j.dump(2) << '\n';
}

InitialLaw point_law(std::vector<double> x0)
{
    return [x0](std::uint64_t, double* x) {
        for (std::size_t a = 0; a < x0.size(); ++a)
            x[a] = x0[a];
    };
}

InitialLaw gaussian_law(int dim, double mean, double variance, std::uint64_t seed)
{
    const double sd = std::sqrt(variance);
    return [=](std::uint64_t index, double* x) {
        CounterRng rng(seed, index, ~0ULL);
        std::normal_distribution<double> g;
        for (int a = 0; a < dim; ++a)
            x[a] = mean + sd * g(rng);
    };
}

InitialLaw uniform_torus_law(int dim, std::uint64_t seed)
{
    return [=](std::uint64_t index, double* x) {
        CounterRng rng(seed, index, ~0ULL);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int a = 0; a < dim; ++a)
            x[a] = u(rng);
    };
}

namespace {

void check_drift_bound(const kernels::LineDrift& v, double Mbar, int d, double t_end)
{
    const int nx = d == 1 ? 401 : 41;
    std::vector<double> x(2, 0.0);
    for (int k = 0; k <= 10; ++k) {
        double t = t_end * k / 10.0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < (d == 1 ? 1 : nx); ++j) {
                x[0] = -8.0 + 16.0 * i / (nx - 1);
                if (d == 2)
                    x[1] = -8.0 + 16.0 * j / (nx - 1);
                double s = 0.0;
                for (int a = 0; a < d; ++a) {
                    double b = v(t, x.data(), a);
                    s += b * b;
                }
                if (std::sqrt(s) > Mbar * (1.0 + 1e-12))
                    throw Error(Errc::DriftBoundViolation, "drift exceeds its declared bound", std::sqrt(s));
            }
    }
}

ParticleEnsemble run_line_sde(const kernels::LineDrift& b, double confinement, const InitialLaw& x0,
                              const SdeOptions& opt)
{
    if (opt.dim != 1 && opt.dim != 2)
        throw Error(Errc::DimensionUnsupported, "particle dimension must be 1 or 2", opt.dim);
    if (!(opt.dt > 0.0) || opt.dt > 1e-3)
        throw Error(Errc::InvalidTime, "SDE step must lie in (0, 1e-3]", opt.dt);
    ParticleEnsemble e;
    e.dim = opt.dim;
    e.domain = Domain::line;
    e.seed = opt.seed;
    e.positions.resize(opt.N * std::size_t(opt.dim));
    for (std::size_t p = 0; p < opt.N; ++p)
        x0(p, e.positions.data() + p * opt.dim);
    const long steps = std::lround(opt.t_end / opt.dt);
    const double dt = steps > 0 ? opt.t_end / double(steps) : 0.0;
    for (long k = 0; k < steps; ++k)
        kernels::line_sde_step(opt.exec, opt.dim, b, confinement, k * dt, dt, opt.seed, std::uint64_t(k),
                               e.positions.data(), opt.N);
    e.time = opt.t_end;
    return e;
}

} // namespace

ParticleEnsemble simulate_confined_sde(const kernels::LineDrift& v, double Mbar, const InitialLaw& x0,
                                       const SdeOptions& opt)
{
    check_drift_bound(v, Mbar, opt.dim, opt.t_end);
    return run_line_sde(v, 1.0, x0, opt);
}

ParticleEnsemble simulate_drift_sde(const kernels::LineDrift& b, double Mbar, const InitialLaw& x0,
                                    const SdeOptions& opt)
{
    check_drift_bound(b, Mbar, opt.dim, opt.t_end);
    return run_line_sde(b, 0.0, x0, opt);
}

GridDensity histogram_density(const ParticleEnsemble& ens, const TorusGrid& g)
{
    if (ens.domain != Domain::torus || ens.dim != g.dim())
        throw Error(Errc::DomainMismatch, "histogram needs a torus ensemble on a grid of the same dimension");
    std::vector<std::uint64_t> counts(g.size());
    kernels::deposit_ngp(kernels::Exec::parallel, g, ens.positions.data(), ens.size(), counts.data());
    std::vector<double> v(g.size());
    const double scale = 1.0 / (double(ens.size()) * g.cell_volume());
    for (std::size_t c = 0; c < v.size(); ++c)
        v[c] = double(counts[c]) * scale;
    return GridDensity::adopt(g, std::move(v), 1e-12);
}

GridDensity smoothed_histogram(const ParticleEnsemble& ens, const TorusGrid& g)
{
    GridDensity hist = histogram_density(ens, g);
    GridFunction s = heat_convolver(g.h() * g.h(), g).apply(hist.function());
    for (double& x : s.values())
        x = std::max(x, kPositivityFloor);
    return GridDensity::normalize(s);
}

MflResult simulate_mfl_torus(const Objective& obj, const TorusGrid& g, const InitialLaw& x0, const MflOptions& opt,
                             std::optional<double> inf_F)
{
    const int d = g.dim();
    MflResult res;
    ParticleEnsemble& e = res.ensemble;
    e.dim = d;
    e.domain = Domain::torus;
    e.seed = opt.seed;
    e.positions.resize(opt.N * std::size_t(d));
    for (std::size_t p = 0; p < opt.N; ++p) {
        double* x = e.positions.data() + p * d;
        x0(p, x);
        for (int a = 0; a < d; ++a)
            x[a] -= std::floor(x[a]);
    }
    const long steps = std::lround(opt.t_end / opt.dt);
    const double dt = opt.t_end / double(std::max(steps, 1L));
    const long rec = std::max(1L, std::lround(opt.record_every / dt));
    auto warm = obj.make_warm();
    std::vector<GridFunction> drift(d);
    std::vector<const double*> ptr(d);
    for (long k = 0; k <= steps; ++k) {
        GridDensity mu = smoothed_histogram(e, g);
        auto E = obj.evaluate(mu, &warm);
        if (k % rec == 0 || k == steps) {
            FlowRecord r;
            r.t = k * dt;
            r.F = E.value;
            r.dissipation = weighted_gradient_norm2(E.fv, mu);
            if (inf_F)
                r.gap = E.value - *inf_F;
            r.min_density = mu.min();
            r.max_density = mu.max();
            res.trace.rows.push_back(r);
        }
        if (k == steps) {
            res.trace.final_density = mu;
            break;
        }
        for (int a = 0; a < d; ++a) {
            drift[a] = partial(E.g_fv, a);
            drift[a] *= -1.0;
            ptr[a] = drift[a].data();
        }
        kernels::langevin_torus_step(opt.exec, g, ptr.data(), obj.tau(), dt, opt.seed, std::uint64_t(k),
                                     e.positions.data(), opt.N);
    }
    e.time = opt.t_end;
    res.trace.steps = steps;
    return res;
}

double subgaussian_check(const ParticleEnsemble& ens, double M0)
{
    if (ens.domain != Domain::line)
        throw Error(Errc::DomainMismatch, "subgaussian check is for line ensembles");
    if (!(M0 > 0.0))
        throw Error(Errc::HypothesisViolated, "M0 must be positive", M0);
    const int d = ens.dim;
    double s = 0.0;
    for (std::size_t p = 0; p < ens.size(); ++p) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a)
            r2 += ens.positions[p * d + a] * ens.positions[p * d + a];
        s += std::exp(std::min(r2 / (M0 * M0), 700.0));
    }
    return s / double(ens.size());
}

} // namespace mfl
