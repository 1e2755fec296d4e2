#include "mfl/eot.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/error.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

using kernels::Exec;

GridFunction eot_cost(double tau, const TorusGrid& g)
{
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "EOT temperature must be positive", tau);
    GridFunction c = wrapped_heat_kernel(tau, g);
    for (double& x : c.values())
        x = -tau * std::log(x);
    return c;
}

namespace {

void require_positive(const GridDensity& mu, const char* where)
{
    if (mu.min() <= 0.0)
        throw Error(Errc::DegenerateDensity, where, mu.min());
}

// -tau log int q(tau, x - y) exp(pot(y)/tau) dens(y) dy, stabilized by the max of pot
GridFunction soft_update(const Convolver& q, const GridFunction& pot, const GridDensity& dens, double tau)
{
    const double a = *std::max_element(pot.values().begin(), pot.values().end());
    GridFunction g(pot.grid());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = dens[i] * std::exp((pot[i] - a) / tau);
    GridFunction c = q.apply(g);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = -a - tau * std::log(std::max(c[i], kPositivityFloor));
    return c;
}

// L1 marginal defect and plan mass given the current and the refreshed potential
std::pair<double, double> marginal_defect(const GridFunction& cur, const GridFunction& next,
                                          const GridDensity& dens, double tau)
{
    std::vector<double> err(dens.size()), mass(dens.size());
    for (std::size_t i = 0; i < dens.size(); ++i) {
        double r = std::exp((cur[i] - next[i]) / tau);
        err[i] = dens[i] * std::abs(r - 1.0);
        mass[i] = dens[i] * r;
    }
    const double w = dens.grid().cell_volume();
    return {kernels::sum(Exec::parallel, err.data(), err.size()) * w,
            kernels::sum(Exec::parallel, mass.data(), mass.size()) * w};
}

double integral_against(const GridFunction& f, const GridDensity& mu)
{
    return kernels::dot(Exec::parallel, f.data(), mu.data(), mu.size()) * mu.grid().cell_volume();
}

void fix_gauge(EotResult& r)
{
    double m = r.phi.mean();
    for (std::size_t i = 0; i < r.phi.size(); ++i) {
        r.phi[i] -= m;
        r.psi[i] += m;
    }
}

} // namespace

EotResult sinkhorn(const GridDensity& mu, const GridDensity& nu, double tau, const SinkhornOptions& opt)
{
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "EOT temperature must be positive", tau);
    require_same_grid(mu.grid(), nu.grid(), "sinkhorn");
    require_positive(mu, "sinkhorn needs positive marginals");
    require_positive(nu, "sinkhorn needs positive marginals");
    const Convolver& q = heat_convolver(tau, mu.grid());

    GridFunction psi = opt.warm_psi ? *opt.warm_psi : GridFunction(mu.grid());
    GridFunction phi = soft_update(q, psi, nu, tau);
    double res = 0.0, mass = 1.0;
    int it = 0;
    for (;;) {
        ++it;
        psi = soft_update(q, phi, mu, tau);
        GridFunction next = soft_update(q, psi, nu, tau);
        std::tie(res, mass) = marginal_defect(phi, next, mu, tau);
        if (res <= opt.tol)
            break;
        if (it >= opt.max_iter)
            throw Error(Errc::NoConvergence, "Sinkhorn did not reach the marginal tolerance", res);
        phi = std::move(next);
    }
    EotResult r;
    r.iterations = it;
    r.residual_mu = res;
    r.residual_nu = marginal_defect(psi, soft_update(q, phi, mu, tau), nu, tau).first;
    r.value = integral_against(phi, mu) + integral_against(psi, nu) - tau * (mass - 1.0);
    r.phi = std::move(phi);
    r.psi = std::move(psi);
    fix_gauge(r);
    return r;
}

EotResult symmetric_sinkhorn(const GridDensity& mu, double tau, const SinkhornOptions& opt)
{
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "EOT temperature must be positive", tau);
    require_positive(mu, "sinkhorn needs positive marginals");
    const Convolver& q = heat_convolver(tau, mu.grid());

    GridFunction phi = opt.warm_psi ? *opt.warm_psi : GridFunction(mu.grid());
    double res = 0.0, mass = 1.0;
    int it = 0;
    for (;;) {
        ++it;
        GridFunction t = soft_update(q, phi, mu, tau);
        std::tie(res, mass) = marginal_defect(phi, t, mu, tau);
        if (res <= opt.tol)
            break;
        if (it >= opt.max_iter)
            throw Error(Errc::NoConvergence, "symmetric Sinkhorn did not reach the marginal tolerance", res);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i] = 0.5 * (phi[i] + t[i]);
    }
    EotResult r;
    r.iterations = it;
    r.residual_mu = res;
    r.residual_nu = res;
    r.value = 2.0 * integral_against(phi, mu) - tau * (mass - 1.0);
    r.psi = phi;
    r.phi = std::move(phi);
    fix_gauge(r);
    return r;
}

std::vector<double> transport_plan(const EotResult& r, const GridDensity& mu, const GridDensity& nu, double tau)
{
    const TorusGrid& g = mu.grid();
    GridFunction q = wrapped_heat_kernel(tau, g);
    const std::size_t N = g.size();
    const double w = g.cell_volume();
    std::vector<double> plan(N * N);
    for (std::size_t i = 0; i < N; ++i) {
        Point xi = g.point(i);
        for (std::size_t j = 0; j < N; ++j) {
            Point xj = g.point(j);
            // displacement class of x_i - x_j
            std::size_t k;
            if (g.dim() == 1) {
                k = (i + N - j) % N;
            } else {
                int n = g.n();
                int a = int(std::lround((xi[0] - xj[0]) * n) + n) % n;
                int b = int(std::lround((xi[1] - xj[1]) * n) + n) % n;
                k = std::size_t(a) * n + b;
            }
            plan[i * N + j] = std::exp((r.phi[i] + r.psi[j]) / tau) * q[k] * mu[i] * nu[j] * w * w;
        }
    }
    return plan;
}

Evaluation self_transport_fv(const GridDensity& mu, double tau, const SinkhornOptions& opt)
{
    EotResult r = symmetric_sinkhorn(mu, tau, opt);
    GridFunction fv = r.phi + r.psi;
    return {r.value, fv.center()};
}

SelfTransport::SelfTransport(double tau, double weight, SinkhornOptions opt)
    : Functional(weight), tau_(tau), opt_(opt)
{
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "EOT temperature must be positive", tau);
    opt_.warm_psi = nullptr;
}

Evaluation SelfTransport::evaluate_unweighted(const GridDensity& mu, WarmStart* warm) const
{
    SinkhornOptions o = opt_;
    bool use_warm = warm && !warm->potentials.empty() && warm->uses % 50 != 0
                    && warm->potentials[0].grid() == mu.grid();
    if (use_warm)
        o.warm_psi = &warm->potentials[0];
    EotResult r = symmetric_sinkhorn(mu, tau_, o);
    GridFunction fv = r.phi + r.psi;
    if (warm) {
        GridFunction raw = fv;
        raw *= 0.5;
        warm->potentials.assign(1, std::move(raw));
        ++warm->uses;
    }
    return {r.value, fv.center()};
}

AfiSandwich afi_sandwich(const GridDensity& mu, double tau, double slack)
{
    SinkhornOptions o;
    o.tol = 1e-12;
    AfiSandwich s;
    s.d_tau = symmetric_sinkhorn(mu, tau, o).value;
    s.entropy = entropy(mu);
    s.fisher = fisher_information(mu);
    s.mid = s.d_tau + tau * s.entropy;
    s.upper = tau * tau * s.fisher / 8.0;
    s.ratio = s.upper > 0.0 ? s.mid / s.upper : 0.0;
    if (s.mid < s.lower - slack || s.mid > s.upper + slack)
        throw Error(Errc::SandwichViolation, "D_tau + tau H escaped [0, tau^2 I / 8]", s.mid);
    return s;
}

} // namespace mfl
