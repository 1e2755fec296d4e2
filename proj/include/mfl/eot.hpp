#pragma once

#include "mfl/functionals.hpp"
#include "mfl/grid.hpp"

namespace mfl {

// c_tau(z) = -tau log q(tau, z), stored over displacements
GridFunction eot_cost(double tau, const TorusGrid& g);

struct SinkhornOptions {
    double tol = 1e-9;
    int max_iter = 10000;
    const GridFunction* warm_psi = nullptr;
};

struct EotResult {
    GridFunction phi;
    GridFunction psi;
    double value = 0.0;
    double residual_mu = 0.0;  // L1 error of the plan's first marginal
    double residual_nu = 0.0;
    int iterations = 0;
};

EotResult sinkhorn(const GridDensity& mu, const GridDensity& nu, double tau, const SinkhornOptions& opt = {});
// mu = nu, damped half-step averaging; warm_psi seeds phi
EotResult symmetric_sinkhorn(const GridDensity& mu, double tau, const SinkhornOptions& opt = {});

// explicit plan weights gamma_ij (cell masses), for checks on small grids
std::vector<double> transport_plan(const EotResult& r, const GridDensity& mu, const GridDensity& nu, double tau);

Evaluation self_transport_fv(const GridDensity& mu, double tau, const SinkhornOptions& opt = {});

// D_tau(mu) = T_tau(mu, mu)
class SelfTransport final : public Functional {
public:
    explicit SelfTransport(double tau, double weight = 1.0, SinkhornOptions opt = {});
    std::string kind() const override { return "self-transport"; }
    double tau() const { return tau_; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart* warm) const override;

private:
    double tau_;
    SinkhornOptions opt_;
};

struct AfiSandwich {
    double lower = 0.0;
    double mid = 0.0;    // D_tau + tau H
    double upper = 0.0;  // tau^2 I / 8
    double ratio = 0.0;  // mid / upper
    double d_tau = 0.0;
    double entropy = 0.0;
    double fisher = 0.0;
};

AfiSandwich afi_sandwich(const GridDensity& mu, double tau, double slack = 1e-8);

} // namespace mfl
