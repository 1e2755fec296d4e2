#include "mfl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfl/error.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

std::string variant_name(Variant v) { return v == Variant::standard ? "standard" : "debiased"; }

Variant parse_variant(const std::string& s)
{
    if (s == "standard")
        return Variant::standard;
    if (s == "debiased")
        return Variant::debiased;
    throw Error(Errc::ConfigError, "unknown variant " + s);
}

void TrajectoryProblem::validate() const
{
    if (T < 1)
        throw Error(Errc::ConfigError, "trajectory problem needs T >= 1", T);
    if (int(observations.size()) != T + 1)
        throw Error(Errc::ConfigError, "trajectory problem needs T + 1 observations", double(observations.size()));
    for (const auto& o : observations)
        require_same_grid(o.grid(), observations.front().grid(), "trajectory observations");
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "trajectory diffusivity must be positive", tau);
    if (!(sigma > 0.0))
        throw Error(Errc::InvalidSigma, "fit bandwidth must be positive", sigma);
}

ChainObjective::ChainObjective(TrajectoryProblem p, SinkhornOptions sk) : p_(std::move(p)), sk_(sk)
{
    p_.validate();
    sk_.warm_psi = nullptr;
    taus_.assign(p_.T + 1, p_.tau);
    if (p_.variant == Variant::debiased) {
        taus_.front() = 0.5 * p_.tau;
        taus_.back() = 0.5 * p_.tau;
    }
    const double w = 1.0 / (p_.T + 1);
    for (const auto& o : p_.observations)
        fits_.emplace_back(o, p_.sigma, w);
}

Chain ChainObjective::uniform_chain() const { return Chain(p_.T + 1, GridDensity::uniform(p_.grid())); }

ChainEvaluation ChainObjective::evaluate(const Chain& chain, ChainWarm* warm) const
{
    const int T = p_.T;
    if (int(chain.size()) != T + 1)
        throw Error(Errc::GridMismatch, "chain length does not match the problem");
    for (const auto& m : chain)
        require_same_grid(m.grid(), p_.grid(), "chain marginal");
    ChainEvaluation e;
    e.g_fv.assign(T + 1, GridFunction(p_.grid()));
    e.entropies.assign(T + 1, 0.0);
    for (int i = 0; i <= T; ++i) {
        Evaluation f = fits_[i].evaluate(chain[i]);
        e.fit += f.value;
        e.g_fv[i] += f.fv;
    }
    const double eps = p_.tau / T;
    if (warm && int(warm->psi.size()) != T)
        warm->psi.clear();
    bool use_warm = warm && !warm->psi.empty() && warm->uses % 50 != 0;
    std::vector<EotResult> couplings(T);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < T; ++i) {
        SinkhornOptions o = sk_;
        if (use_warm)
            o.warm_psi = &warm->psi[i];
        couplings[i] = sinkhorn(chain[i], chain[i + 1], eps, o);
    }
    for (int i = 0; i < T; ++i) {
        e.transport += T * couplings[i].value;
        e.g_fv[i].add_scaled(double(T), couplings[i].phi);
        e.g_fv[i + 1].add_scaled(double(T), couplings[i].psi);
        e.sinkhorn_iterations += couplings[i].iterations;
    }
    if (warm) {
        warm->psi.resize(T);
        for (int i = 0; i < T; ++i)
            warm->psi[i] = couplings[i].psi;
        ++warm->uses;
    }
    e.fv.resize(T + 1);
    for (int i = 0; i <= T; ++i) {
        if (chain[i].min() <= 0.0)
            throw Error(Errc::DegenerateDensity, "chain marginal must be positive", chain[i].min());
        e.g_fv[i].center();
        e.entropies[i] = entropy(chain[i]);
        e.entropy += taus_[i] * e.entropies[i];
        e.fv[i] = e.g_fv[i];
        e.fv[i].add_scaled(taus_[i], log_density(chain[i]));
        e.fv[i].center();
    }
    e.value = e.fit + e.transport + e.entropy;
    return e;
}

ChainObjective build_objective(const TrajectoryProblem& p) { return ChainObjective(p); }

double chain_dissipation(const ChainEvaluation& e, const Chain& chain)
{
    double s = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i)
        s += weighted_gradient_norm2(e.fv[i], chain[i]);
    return s;
}

ChainMinimum minimize_chain(const ChainObjective& obj, const Chain& start, const MinimizeOptions& opt)
{
    const auto& taus = obj.diffusivities();
    ChainWarm warm;
    Chain mu = start;
    auto E = obj.evaluate(mu, &warm);
    double r = std::sqrt(chain_dissipation(E, mu));
    double theta = opt.theta;
    int it = 0;
    while (r > opt.tol) {
        if (it >= opt.max_iter || theta < 1e-12)
            throw Error(Errc::NoConvergence, "chain fixed point did not reach tolerance", r);
        ++it;
        Chain cand;
        cand.reserve(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            GridDensity nu = gibbs_density(E.g_fv[i], taus[i]);
            std::vector<double> v(nu.size());
            for (std::size_t c = 0; c < v.size(); ++c)
                v[c] = (1.0 - theta) * mu[i][c] + theta * nu[c];
            cand.push_back(GridDensity::normalize(mu[i].grid(), std::move(v)));
        }
        auto Ec = obj.evaluate(cand, &warm);
        double rc = std::sqrt(chain_dissipation(Ec, cand));
        if (rc > r) {
            theta *= 0.5;
            continue;
        }
        mu = std::move(cand);
        E = std::move(Ec);
        r = rc;
    }
    return {mu, E.value, r, it};
}

void ChainTrace::write_csv(const std::string& path) const
{
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    os << "t,F,dissipation,gap,min_density,max_density,other_variant_F,endpoint_term\n";
    char buf[320];
    for (const auto& r : rows) {
        const auto& f = r.flow;
        std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.t, f.F, f.dissipation,
                      f.gap, f.min_density, f.max_density, r.other_value, r.endpoint_term);
        os << buf;
    }
}

ChainTrace coupled_flow(const ChainObjective& obj, const Chain& start, const FlowConfig& cfg,
                        std::optional<double> inf_F, bool record_other)
{
    const auto& p = obj.problem();
    const auto& taus = obj.diffusivities();
    TrajectoryProblem q = p;
    q.variant = p.variant == Variant::standard ? Variant::debiased : Variant::standard;
    ChainObjective other(q);
    const double tau_min = *std::min_element(taus.begin(), taus.end());

    ChainTrace tr;
    ChainWarm warm;
    Chain mu = start;
    double t = 0.0, next_record = 0.0, lip = 0.0;
    double last_F = std::numeric_limits<double>::infinity();
    const double eps_t = 1e-12 * cfg.t_end;
    const TorusGrid& g = p.grid();
    for (;;) {
        auto E = obj.evaluate(mu, &warm);
        for (const auto& f : E.g_fv)
            lip = std::max(lip, kernels::max_face_speed(g, f.data()));
        if (t >= next_record - eps_t) {
            ChainRecord r;
            r.flow.t = t;
            r.flow.F = E.value;
            r.flow.dissipation = chain_dissipation(E, mu);
            if (inf_F) {
                r.flow.gap = E.value - *inf_F;
                if (r.flow.gap < -1e-6)
                    throw Error(Errc::AssertionFailure, "chain flow went below the reference minimum", r.flow.gap);
            }
            r.flow.min_density = std::numeric_limits<double>::infinity();
            for (const auto& m : mu) {
                r.flow.min_density = std::min(r.flow.min_density, m.min());
                r.flow.max_density = std::max(r.flow.max_density, m.max());
            }
            r.flow.lipschitz = lip;
            r.endpoint_term = 0.5 * p.tau * (E.entropies.front() + E.entropies.back());
            r.other_value = record_other ? other.evaluate(mu).value : std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(last_F) && E.value - last_F > cfg.energy_slack * (1.0 + std::abs(last_F)))
                throw Error(Errc::AssertionFailure, "chain objective increased along the flow", E.value - last_F);
            last_F = E.value;
            tr.rows.push_back(r);
            next_record += cfg.record_every;
        }
        if (t >= cfg.t_end - eps_t)
            break;
        double dt = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mu.size(); ++i)
            dt = std::min(dt, stable_dt(g, E.g_fv[i], taus[i], cfg.dt_safety));
        double stop = std::min(cfg.t_end, next_record);
        if (t + dt > stop - eps_t)
            dt = stop - t;
        Chain nxt(mu.size());
#pragma omp parallel for schedule(static)
        for (int i = 0; i < int(mu.size()); ++i)
            nxt[i] = step(mu[i], E.g_fv[i], taus[i], dt, cfg.scheme, kernels::Exec::serial);
        mu = std::move(nxt);
        t = (t + dt > stop - eps_t) ? stop : t + dt;
        ++tr.steps;
    }
    tr.final_chain = mu;
    tr.lipschitz = lip;
    double mbar = std::max(lip, tau_min);
    tr.burn_in = tau_min / (4.0 * mbar * mbar);
    return tr;
}

TrajectoryProblem generate_synthetic(const GridFunction& V, double tau_true, int T, std::size_t n_samples,
                                     double sigma_obs, std::uint64_t seed, const InitialLaw& x0, double dt)
{
    if (n_samples < 100)
        throw Error(Errc::InsufficientData, "synthetic problem needs at least 100 samples", double(n_samples));
    if (T < 1)
        throw Error(Errc::ConfigError, "synthetic problem needs T >= 1", T);
    const TorusGrid& g = V.grid();
    const int d = g.dim();
    ParticleEnsemble e;
    e.dim = d;
    e.domain = Domain::torus;
    e.seed = seed;
    e.positions.resize(n_samples * d);
    InitialLaw law = x0 ? x0 : uniform_torus_law(d, seed);
    for (std::size_t p = 0; p < n_samples; ++p) {
        double* x = e.positions.data() + p * d;
        law(p, x);
        for (int a = 0; a < d; ++a)
            x[a] -= std::floor(x[a]);
    }
    std::vector<GridFunction> drift(d);
    std::vector<const double*> ptr(d);
    for (int a = 0; a < d; ++a) {
        drift[a] = partial(V, a);
        drift[a] *= -1.0;
        ptr[a] = drift[a].data();
    }
    TrajectoryProblem prob;
    prob.T = T;
    prob.sigma = sigma_obs;
    prob.tau = tau_true;
    prob.observations.push_back(histogram_density(e, g));
    const long per = std::max(1L, std::lround(1.0 / (T * dt)));
    const double h = 1.0 / (double(T) * per);
    std::uint64_t k = 0;
    for (int i = 1; i <= T; ++i) {
        for (long s = 0; s < per; ++s, ++k)
            kernels::langevin_torus_step(kernels::Exec::parallel, g, ptr.data(), tau_true, h, seed, k,
                                         e.positions.data(), n_samples);
        prob.observations.push_back(histogram_density(e, g));
    }
    return prob;
}

void write_problem(const std::string& path, const TrajectoryProblem& p)
{
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    char buf[160];
    std::snprintf(buf, sizeof buf, "trajectory T=%d n=%d sigma=%.17g tau=%.17g variant=%s\n", p.T, p.grid().n(),
                  p.sigma, p.tau, variant_name(p.variant).c_str());
    os << buf;
    for (const auto& o : p.observations)
        write_grid(os, o.function());
}

TrajectoryProblem read_problem(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(Errc::IoError, "cannot read " + path);
    std::string line;
    std::getline(is, line);
    TrajectoryProblem p;
    int n = 0;
    char variant[32] = {0};
    if (std::sscanf(line.c_str(), "trajectory T=%d n=%d sigma=%lf tau=%lf variant=%31s", &p.T, &n, &p.sigma, &p.tau,
                    variant) != 5)
        throw Error(Errc::IoError, "bad trajectory header: " + line);
    p.variant = parse_variant(variant);
    for (int i = 0; i <= p.T; ++i) {
        GridFunction f = read_grid(is);
        if (f.grid().n() != n)
            throw Error(Errc::GridMismatch, "trajectory block does not match header");
        p.observations.push_back(GridDensity::normalize(f));
    }
    p.validate();
    return p;
}

} // namespace mfl
