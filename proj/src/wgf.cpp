#include "mfl/wgf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "mfl/error.hpp"

namespace mfl {

Scheme parse_scheme(const std::string& s)
{
    if (s == "fv-upwind")
        return Scheme::fv_upwind;
    if (s == "fv-sg")
        return Scheme::fv_sg;
    throw Error(Errc::ConfigError, "unknown scheme " + s);
}

std::string scheme_name(Scheme s) { return s == Scheme::fv_upwind ? "fv-upwind" : "fv-sg"; }

kernels::FluxScheme flux_scheme(Scheme s)
{
    return s == Scheme::fv_upwind ? kernels::FluxScheme::upwind : kernels::FluxScheme::exponential_fit;
}

void FlowTrace::write_csv(std::ostream& os) const
{
    os << "t,F,dissipation,gap,min_density,max_density\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.F, r.dissipation, r.gap,
                      r.min_density, r.max_density);
        os << buf;
    }
}

void FlowTrace::write_csv(const std::string& path) const
{
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    write_csv(os);
}

double stable_dt(const TorusGrid& g, const GridFunction& P, double tau, double safety)
{
    if (!(safety > 0.0 && safety <= 1.0))
        throw Error(Errc::CflViolation, "dt_safety must lie in (0, 1]", safety);
    const double h = g.h();
    double dt = std::numeric_limits<double>::infinity();
    if (tau > 0.0)
        dt = h * h / (2.0 * g.dim() * tau);
    double speed = kernels::max_face_speed(g, P.data());
    if (speed > 0.0)
        dt = std::min(dt, h / speed);
    if (!std::isfinite(dt))
        dt = h;
    return safety * dt;
}

GridDensity step(const GridDensity& mu, const GridFunction& P, double tau, double dt, Scheme scheme,
                 kernels::Exec ex)
{
    require_same_grid(mu.grid(), P.grid(), "step");
    const TorusGrid& g = mu.grid();
    auto fs = flux_scheme(scheme);
    double out = kernels::outflow_fraction(g, fs, P.data(), tau, dt);
    if (out > 1.0)
        throw Error(Errc::CflViolation, "time step exceeds the positivity bound", out);
    std::vector<double> v(mu.size());
    kernels::fv_update(ex, g, fs, mu.data(), P.data(), tau, dt, v.data());
    for (double x : v)
        if (x < 0.0)
            throw Error(Errc::NegativeDensity, "finite-volume step produced a negative cell", x);
    return GridDensity::adopt(g, std::move(v), 1e-9);
}

GridDensity step(const GridDensity& mu, const Objective& obj, double dt, Scheme scheme)
{
    return step(mu, obj.drift_potential(mu), obj.tau(), dt, scheme);
}

double dissipation(const GridDensity& mu, const Objective& obj)
{
    return weighted_gradient_norm2(obj.first_variation(mu), mu);
}

FlowTrace run_flow(const GridDensity& mu0, const Objective& obj, const FlowConfig& cfg, std::optional<double> inf_F)
{
    if (!(cfg.t_end > 0.0) || !(cfg.record_every > 0.0))
        throw Error(Errc::InvalidTime, "flow horizon and record interval must be positive");
    const TorusGrid& g = mu0.grid();
    const double tau = obj.tau();
    auto warm = obj.make_warm();

    FlowTrace tr;
    tr.initial_mass = mu0.mass();
    GridDensity mu = mu0;
    double t = 0.0;
    double next_record = 0.0;
    double next_snap = 0.0;
    double lip = 0.0;
    double last_F = std::numeric_limits<double>::infinity();
    const double eps_t = 1e-12 * cfg.t_end;

    for (;;) {
        auto E = obj.evaluate(mu, &warm);
        lip = std::max(lip, kernels::max_face_speed(g, E.g_fv.data()));
        if (t >= next_record - eps_t) {
            FlowRecord r;
            r.t = t;
            r.F = E.value;
            r.dissipation = weighted_gradient_norm2(E.fv, mu);
            if (inf_F) {
                r.gap = E.value - *inf_F;
                if (r.gap < -1e-6)
                    throw Error(Errc::AssertionFailure, "flow went below the reference minimum", r.gap);
            }
            r.min_density = mu.min();
            r.max_density = mu.max();
            r.lipschitz = lip;
            if (std::isfinite(last_F)) {
                double inc = E.value - last_F;
                tr.max_energy_increase = std::max(tr.max_energy_increase, inc);
                if (inc > cfg.energy_slack * (1.0 + std::abs(last_F)))
                    throw Error(Errc::AssertionFailure, "discrete energy inequality violated", inc);
            }
            last_F = E.value;
            tr.rows.push_back(r);
            next_record += cfg.record_every;
        }
        if (cfg.snapshot_every > 0.0 && t >= next_snap - eps_t) {
            tr.snapshot_times.push_back(t);
            tr.snapshots.push_back(mu);
            next_snap += cfg.snapshot_every;
        }
        if (t >= cfg.t_end - eps_t)
            break;
        double dt = stable_dt(g, E.g_fv, tau, cfg.dt_safety);
        double stop = std::min(cfg.t_end, next_record);
        if (cfg.snapshot_every > 0.0)
            stop = std::min(stop, next_snap);
        if (t + dt > stop - eps_t)
            dt = stop - t;
        mu = step(mu, E.g_fv, tau, dt, cfg.scheme, cfg.exec);
        t = (t + dt > stop - eps_t) ? stop : t + dt;
        ++tr.steps;
    }
    tr.final_density = mu;
    tr.final_mass = mu.mass();
    tr.lipschitz = lip;
    if (tau > 0.0) {
        double mbar = std::max(lip, tau);
        tr.burn_in = tau / (4.0 * mbar * mbar);
    }
    return tr;
}

} // namespace mfl
