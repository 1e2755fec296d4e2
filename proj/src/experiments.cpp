#include "mfl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "mfl/eot.hpp"
#include "mfl/error.hpp"
#include "mfl/particles.hpp"
#include "mfl/report.hpp"

namespace mfl::studies {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

GridFunction cosine_field(const TorusGrid& g, double amplitude)
{
    return GridFunction::tabulate(g, [&](const Point& x) {
        double s = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            s += std::cos(2.0 * M_PI * x[a]);
        return amplitude * s;
    });
}

GridFunction cosine_interaction(const TorusGrid& g, double kappa) { return cosine_field(g, -kappa); }

double cosine_amplitude(const GridDensity& mu)
{
    const TorusGrid& g = mu.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        s += mu[i] * std::cos(2.0 * M_PI * g.point(i)[0]);
    return 2.0 * s * g.cell_volume();
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return least_squares(lx, ly).slope;
}

HeatFlowResult heat_flow_study(const HeatFlowParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g(1, p.n);
    auto mu0 = GridDensity::tabulate(g, [&](const Point& x) { return 1.0 + p.amplitude * std::cos(2.0 * M_PI * x[0]); });
    Objective obj({}, p.tau);
    FlowConfig cfg;
    cfg.t_end = p.t_end;
    cfg.record_every = p.record_every;
    cfg.scheme = p.scheme;
    HeatFlowResult r;
    r.trace = run_flow(mu0, obj, cfg);
    r.amplitude0 = cosine_amplitude(mu0);
    r.amplitude = cosine_amplitude(r.trace.final_density);
    r.predicted = r.amplitude0 * std::exp(-4.0 * M_PI * M_PI * p.tau * p.t_end);
    r.rel_error = std::abs(r.amplitude - r.predicted) / std::abs(r.predicted);
    r.monotone = true;
    for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
        if (r.trace.rows[i].F > r.trace.rows[i - 1].F)
            r.monotone = false;
    r.mass_drift = std::abs(r.trace.final_mass - r.trace.initial_mass);
    r.seconds = seconds_since(t0);
    return r;
}

RateResult rate_study(const RateParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g(p.dim, p.n);
    GridFunction W = cosine_interaction(g, p.kappa);
    auto spec = kernel_spectrum(W);
    RateResult r;
    r.tau_c = interaction_tau_threshold(spec);
    Objective obj({std::make_shared<InteractionEnergy>(W)}, p.tau);
    auto mu0 = GridDensity::tabulate(g, [&](const Point& x) { return 1.0 + p.amplitude * std::cos(2.0 * M_PI * x[0]); });

    MinimizeOptions mo;
    mo.tol = 1e-13;
    mo.max_iter = 200000;
    r.inf_F = minimize_fixed_point(obj, mu0, mo).value;

    FlowConfig cfg;
    cfg.t_end = p.t_end;
    cfg.record_every = p.record_every;
    cfg.scheme = p.scheme;
    r.trace = run_flow(mu0, obj, cfg, r.inf_F);
    r.L = r.trace.lipschitz;
    r.envelope = theory::torus_density_envelope(std::max(r.L, p.tau), p.tau, p.dim);
    r.certificate = theory::compact_rates(r.envelope.m, r.envelope.M, p.tau, std::min(r.tau_c, p.tau), p.dim);
    r.certificate.burn_in = r.trace.burn_in;
    FitWindow w;
    w.burn_in = r.trace.burn_in;
    w.gap_floor = p.gap_floor;
    r.fit = rate_fit(r.trace, r.certificate.regime, w);
    r.seconds = seconds_since(t0);
    return r;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t N, double z)
{
    const double n = double(N), ph = double(k) / n, z2 = z * z;
    const double centre = (ph + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
    return {centre - half, centre + half};
}

void KernelCheckResult::write_csv(const std::string& path) const
{
    std::vector<std::vector<double>> rows;
    for (const auto& b : buckets)
        rows.push_back({b.Mbar, b.t, b.x, b.y_lo, b.y_hi, double(b.count), b.density, b.wilson_lo, b.wilson_hi,
                        b.lower, b.upper, b.pass ? 1.0 : 0.0});
    report::write_csv(path,
                      {"Mbar", "t", "x", "y_lo", "y_hi", "count", "density", "wilson_lo", "wilson_hi", "lower",
                       "upper", "pass"},
                      rows);
}

KernelCheckResult kernel_check_study(const KernelCheckParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    KernelCheckResult res;
    std::uint64_t stream = 0;
    for (double Mbar : p.Mbars) {
        auto env = theory::kernel_bounds_rd(Mbar, 1);
        kernels::LineDrift b = [Mbar](double, const double* x, int) { return Mbar * std::sin(2.0 * M_PI * x[0]); };
        for (double x0 : p.starts) {
            // one chain per start point, continued between the requested times
            ParticleEnsemble ens;
            double t_prev = 0.0;
            for (double t : p.times) {
                SdeOptions o;
                o.t_end = t - t_prev;
                o.dt = p.dt;
                o.N = p.N;
                o.seed = p.seed + 1000003 * ++stream;
                InitialLaw law = point_law({x0});
                if (t_prev > 0.0)
                    law = [&ens](std::uint64_t i, double* x) { x[0] = ens.positions[i]; };
                ens = simulate_drift_sde(b, Mbar, law, o);
                t_prev = t;
                const double half = 3.0 * std::sqrt(t), w = 2.0 * half / p.bins;
                std::vector<std::size_t> counts(p.bins, 0);
                for (double y : ens.positions) {
                    double u = (y - (x0 - half)) / w;
                    if (u >= 0.0 && u < p.bins)
                        ++counts[std::size_t(u)];
                }
                for (int k = 0; k < p.bins; ++k) {
                    KernelBucket kb{};
                    kb.Mbar = Mbar;
                    kb.t = t;
                    kb.x = x0;
                    kb.y_lo = x0 - half + k * w;
                    kb.y_hi = kb.y_lo + w;
                    kb.count = counts[k];
                    kb.density = double(kb.count) / (double(p.N) * w);
                    auto [lo, hi] = wilson_interval(kb.count, p.N, 1.0);
                    kb.wilson_lo = lo / w;
                    kb.wilson_hi = hi / w;
                    // Simpson average of the bounds over the bucket
                    auto avg = [&](const auto& f) {
                        const int m = 16;
                        double s = 0.0;
                        for (int j = 0; j <= m; ++j) {
                            double c = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
                            s += c * f(t, {x0}, {kb.y_lo + w * j / m});
                        }
                        return s / (3.0 * m);
                    };
                    kb.lower = avg(env.lower);
                    kb.upper = avg(env.upper);
                    const double infl = p.inflation * 0.5 * (kb.wilson_hi - kb.wilson_lo);
                    kb.pass = kb.density + infl >= kb.lower && kb.density - infl <= kb.upper;
                    res.buckets.push_back(kb);
                }
            }
        }
    }
    std::size_t ok = 0;
    for (const auto& b : res.buckets)
        ok += b.pass;
    res.pass_fraction = res.buckets.empty() ? 0.0 : double(ok) / double(res.buckets.size());
    res.seconds = seconds_since(t0);
    return res;
}

SandwichResult sandwich_study(const SandwichParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    if (std::abs(p.vbar) > p.M)
        throw Error(Errc::HypothesisViolated, "perturbation exceeds the drift bound", p.vbar);
    SandwichResult r;
    r.params = theory::gaussian_sandwich_params(p.eps, p.Mstar, p.M);
    auto law = gaussian_law(1, 0.0, p.start_variance, p.seed);
    {
        ParticleEnsemble e0;
        e0.positions.resize(p.N);
        for (std::size_t i = 0; i < p.N; ++i)
            law(i, &e0.positions[i]);
        r.subgaussian = subgaussian_check(e0, p.Mstar);
        if (r.subgaussian > 2.0)
            throw Error(Errc::HypothesisViolated, "start law is not subgaussian at the requested scale", r.subgaussian);
    }
    const double vbar = p.vbar;
    kernels::LineDrift v = [vbar](double, const double* x, int) { return vbar * std::sin(2.0 * M_PI * x[0]); };
    SdeOptions o;
    o.t_end = r.params.T_eps;
    o.dt = p.dt;
    o.N = p.N;
    o.seed = p.seed;
    auto ens = simulate_confined_sde(v, p.M, law, o);
    const double w = 2.0 * p.range / p.bins;
    std::vector<std::size_t> counts(p.bins, 0);
    for (double x : ens.positions) {
        double u = (x + p.range) / w;
        if (u >= 0.0 && u < p.bins)
            ++counts[std::size_t(u)];
    }
    std::vector<double> x2, wts;
    for (int k = 0; k < p.bins; ++k) {
        if (counts[k] == 0)
            continue;
        double xc = -p.range + (k + 0.5) * w;
        r.x.push_back(xc);
        r.neglog.push_back(-std::log(double(counts[k]) / (double(p.N) * w)));
        x2.push_back(xc * xc);
        wts.push_back(double(counts[k]));
    }
    LinearFit lf = least_squares(x2, r.neglog, wts);
    r.coefficient = lf.slope;
    r.r2 = lf.r2;
    r.seconds = seconds_since(t0);
    return r;
}

AfiResult afi_study(const AfiParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g(1, p.n);
    auto mu = GridDensity::tabulate(g, [&](const Point& x) { return 1.0 + p.amplitude * std::cos(2.0 * M_PI * x[0]); });
    AfiResult r;
    r.taus = p.taus;
    for (double tau : p.taus)
        r.rows.push_back(afi_sandwich(mu, tau));
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<FunctionalPtr> quadratic_fit_terms(const GridDensity& rho, double c, double s)
{
    const TorusGrid& g = rho.grid();
    GridFunction q = wrapped_heat_kernel(s, g);
    GridFunction V = heat_convolver(s, g).apply(rho.function());
    V *= -c;
    q *= 0.5 * c;
    return {std::make_shared<InteractionEnergy>(q), std::make_shared<PotentialEnergy>(V)};
}

double quadratic_fit_value(const GridDensity& mu, const GridDensity& rho, double c, double s)
{
    GridFunction d = mu.function() - rho.function();
    GridFunction qd = heat_convolver(s, mu.grid()).apply(d);
    double v = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        v += d[i] * qd[i];
    return 0.5 * c * v * mu.grid().cell_volume();
}

ApproxResult approx_study(const ApproxParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g(1, p.n);
    auto rho = GridDensity::tabulate(g, [&](const Point& x) { return 1.0 + p.rho_amplitude * std::cos(2.0 * M_PI * x[0]); });
    auto terms = quadratic_fit_terms(rho, p.c, p.s);
    ApproxResult r;
    r.fisher = fisher_information(rho);
    MinimizeOptions mo;
    mo.tol = 1e-12;
    mo.max_iter = 100000;
    for (double tau : p.taus) {
        Objective ent(terms, tau);
        auto with = terms;
        SinkhornOptions so;
        so.tol = 1e-14;
        with.push_back(std::make_shared<SelfTransport>(tau, 1.0, so));
        Objective afi(with, tau);
        auto me = minimize_fixed_point(ent, g, mo);
        auto ma = minimize_fixed_point(afi, g, mo);
        r.taus.push_back(tau);
        r.gap_entropy.push_back(quadratic_fit_value(me.density, rho, p.c, p.s));
        r.gap_afi.push_back(quadratic_fit_value(ma.density, rho, p.c, p.s));
        r.bound.push_back(tau * tau * r.fisher / 8.0);
    }
    r.slope_afi = log_log_slope(r.taus, r.gap_afi);
    r.slope_entropy = log_log_slope(r.taus, r.gap_entropy);
    r.seconds = seconds_since(t0);
    return r;
}

namespace {

TrajectoryRun run_variant(const TrajectoryProblem& base, Variant v, const TrajectoryParams& p)
{
    TrajectoryProblem prob = base;
    prob.variant = v;
    ChainObjective obj(prob);
    TrajectoryRun run;
    MinimizeOptions mo;
    mo.tol = 1e-12;
    mo.max_iter = 20000;
    Chain start = obj.uniform_chain();
    run.inf_F = minimize_chain(obj, start, mo).value;
    FlowConfig cfg;
    cfg.t_end = p.t_end;
    cfg.record_every = p.record_every;
    cfg.scheme = p.scheme;
    run.trace = coupled_flow(obj, start, cfg, run.inf_F, true);
    std::vector<double> t, gap;
    for (const auto& r : run.trace.rows) {
        t.push_back(r.flow.t);
        gap.push_back(r.flow.gap);
    }
    FitWindow w;
    w.burn_in = run.trace.burn_in;
    w.gap_floor = p.gap_floor;
    run.exponential = rate_fit(t, gap, theory::Regime::exponential, w);
    run.reciprocal = rate_fit(t, gap, theory::Regime::reciprocal, w);
    return run;
}

} // namespace

TrajectoryResult trajectory_study(const TrajectoryParams& p)
{
    auto t0 = std::chrono::steady_clock::now();
    TorusGrid g(1, p.n);
    GridFunction V = cosine_field(g, p.potential);
    TrajectoryProblem prob = generate_synthetic(V, p.tau_true, p.T, p.samples, p.sigma, p.seed);
    prob.tau = p.tau;
    TrajectoryResult r;
    r.standard = run_variant(prob, Variant::standard, p);
    r.debiased = run_variant(prob, Variant::debiased, p);
    for (const auto& row : r.standard.trace.rows)
        r.endpoint_defect = std::max(r.endpoint_defect, std::abs(row.flow.F - row.other_value - row.endpoint_term));
    for (const auto& row : r.debiased.trace.rows)
        r.endpoint_defect = std::max(r.endpoint_defect, std::abs(row.other_value - row.flow.F - row.endpoint_term));
    r.seconds = seconds_since(t0);
    return r;
}

} // namespace mfl::studies
