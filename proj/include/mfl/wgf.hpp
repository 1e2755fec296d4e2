#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfl/functionals.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

enum class Scheme { fv_upwind, fv_sg };

Scheme parse_scheme(const std::string& s);
std::string scheme_name(Scheme s);
kernels::FluxScheme flux_scheme(Scheme s);

struct FlowConfig {
    double dt_safety = 0.2;
    double t_end = 1.0;
    double record_every = 0.01;
    Scheme scheme = Scheme::fv_upwind;
    double snapshot_every = 0.0;  // 0 disables snapshots
    double energy_slack = 1e-12;  // allowed F increase between records, relative to 1 + |F|
    kernels::Exec exec = kernels::Exec::parallel;
};

struct FlowRecord {
    double t = 0.0;
    double F = 0.0;
    double dissipation = 0.0;
    double gap = std::numeric_limits<double>::quiet_NaN();
    double min_density = 0.0;
    double max_density = 0.0;
    double lipschitz = 0.0;  // running max of |grad G'|_inf
};

struct FlowTrace {
    std::vector<FlowRecord> rows;
    std::vector<double> snapshot_times;
    std::vector<GridDensity> snapshots;
    GridDensity final_density;
    double lipschitz = 0.0;    // sup over the run of |grad G'|_inf
    double burn_in = 0.0;      // tau / (4 Mbar^2), Mbar = max(L, tau)
    double max_energy_increase = 0.0;
    double initial_mass = 1.0;
    double final_mass = 1.0;
    long steps = 0;

    void write_csv(std::ostream& os) const;
    void write_csv(const std::string& path) const;
};

// dt = safety * min(h^2 / (2 d tau), h / |grad G'|_inf)
double stable_dt(const TorusGrid& g, const GridFunction& drift_potential, double tau, double safety);

// one explicit step with a precomputed drift potential G'[mu]
GridDensity step(const GridDensity& mu, const GridFunction& drift_potential, double tau, double dt,
                 Scheme scheme = Scheme::fv_upwind, kernels::Exec ex = kernels::Exec::parallel);
GridDensity step(const GridDensity& mu, const Objective& obj, double dt, Scheme scheme = Scheme::fv_upwind);

double dissipation(const GridDensity& mu, const Objective& obj);

FlowTrace run_flow(const GridDensity& mu0, const Objective& obj, const FlowConfig& cfg,
                   std::optional<double> inf_F = std::nullopt);

} // namespace mfl
