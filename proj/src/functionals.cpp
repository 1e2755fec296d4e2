#include "mfl/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "mfl/error.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

using kernels::Exec;

Evaluation Functional::evaluate(const GridDensity& mu, WarmStart* warm) const
{
    Evaluation e = evaluate_unweighted(mu, warm);
    if (weight_ != 1.0) {
        e.value *= weight_;
        e.fv *= weight_;
    }
    return e;
}

bool is_even(const GridFunction& W, double tol)
{
    const TorusGrid& g = W.grid();
    const int n = g.n();
    const double scale = std::max(1.0, W.max_abs());
    auto flip = [n](int i) { return (n - i) % n; };
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i)
            if (std::abs(W[i] - W[flip(i)]) > tol * scale)
                return false;
        return true;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double w = W[std::size_t(i) * n + j];
            if (std::abs(w - W[std::size_t(flip(i)) * n + j]) > tol * scale
                || std::abs(w - W[std::size_t(i) * n + flip(j)]) > tol * scale)
                return false;
        }
    return true;
}

const Convolver& heat_convolver(double t, const TorusGrid& g)
{
    static std::mutex mu;
    static std::map<std::tuple<std::uint64_t, int, int>, std::unique_ptr<Convolver>> cache;
    if (!(t > 0.0))
        throw Error(Errc::InvalidTime, "heat kernel time must be positive", t);
    std::uint64_t bits;
    std::memcpy(&bits, &t, sizeof bits);
    auto key = std::make_tuple(bits, g.dim(), g.n());
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Convolver>(wrapped_heat_kernel(t, g))).first;
    return *it->second;
}

double weighted_gradient_norm2(const GridFunction& f, const GridDensity& mu)
{
    require_same_grid(f.grid(), mu.grid(), "weighted_gradient_norm2");
    std::vector<double> t(mu.size(), 0.0);
    for (int a = 0; a < mu.grid().dim(); ++a) {
        GridFunction d = partial(f, a);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] += d[i] * d[i] * mu[i];
    }
    return kernels::sum(Exec::parallel, t.data(), t.size()) * mu.grid().cell_volume();
}

Evaluation potential_value_and_fv(const GridFunction& V, const GridDensity& mu)
{
    require_same_grid(V.grid(), mu.grid(), "potential");
    double v = kernels::dot(Exec::parallel, V.data(), mu.data(), mu.size()) * mu.grid().cell_volume();
    return {v, V.centered()};
}

Evaluation interaction_value_and_fv(const GridFunction& W, const GridDensity& mu)
{
    require_same_grid(W.grid(), mu.grid(), "interaction");
    if (!is_even(W))
        throw Error(Errc::NotEven, "interaction kernel must be even");
    GridFunction wm = convolve_periodic(W, mu.function());
    double v = kernels::dot(Exec::parallel, wm.data(), mu.data(), mu.size()) * mu.grid().cell_volume();
    wm *= 2.0;
    return {v, wm.center()};
}

namespace {

Evaluation fit_eval(const GridDensity& rho, const Convolver& q, const GridDensity& mu)
{
    require_same_grid(rho.grid(), mu.grid(), "fit");
    GridFunction s = q.apply(mu.function());
    GridFunction ratio(mu.grid());
    std::vector<double> t(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double si = std::max(s[i], kPositivityFloor);
        t[i] = std::log(si) * rho[i];
        ratio[i] = rho[i] / si;
    }
    double v = -kernels::sum(Exec::parallel, t.data(), t.size()) * mu.grid().cell_volume();
    GridFunction fv = q.apply(ratio);
    fv *= -1.0;
    return {v, fv.center()};
}

} // namespace

Evaluation fit_value_and_fv(const GridDensity& rho_hat, double sigma, const GridDensity& mu)
{
    if (!(sigma > 0.0))
        throw Error(Errc::InvalidSigma, "fit bandwidth must be positive", sigma);
    return fit_eval(rho_hat, heat_convolver(sigma, mu.grid()), mu);
}

PotentialEnergy::PotentialEnergy(GridFunction V, double weight) : Functional(weight), V_(std::move(V)) {}

Evaluation PotentialEnergy::evaluate_unweighted(const GridDensity& mu, WarmStart*) const
{
    return potential_value_and_fv(V_, mu);
}

InteractionEnergy::InteractionEnergy(GridFunction W, double weight)
    : Functional(weight), W_(std::move(W))
{
    if (!is_even(W_))
        throw Error(Errc::NotEven, "interaction kernel must be even");
    conv_ = Convolver(W_);
}

Evaluation InteractionEnergy::evaluate_unweighted(const GridDensity& mu, WarmStart*) const
{
    GridFunction wm = conv_.apply(mu.function());
    double v = kernels::dot(Exec::parallel, wm.data(), mu.data(), mu.size()) * mu.grid().cell_volume();
    wm *= 2.0;
    return {v, wm.center()};
}

FitFunctional::FitFunctional(GridDensity rho_hat, double sigma, double weight)
    : Functional(weight), rho_(std::move(rho_hat)), sigma_(sigma)
{
    if (!(sigma > 0.0))
        throw Error(Errc::InvalidSigma, "fit bandwidth must be positive", sigma);
    q_ = &heat_convolver(sigma, rho_.grid());
}

Evaluation FitFunctional::evaluate_unweighted(const GridDensity& mu, WarmStart*) const
{
    return fit_eval(rho_, *q_, mu);
}

Evaluation EntropyFunctional::evaluate_unweighted(const GridDensity& mu, WarmStart*) const
{
    if (mu.min() <= 0.0)
        throw Error(Errc::DegenerateDensity, "entropy first variation needs a positive density", mu.min());
    return {entropy(mu), log_density(mu).center()};
}

SumFunctional::SumFunctional(std::vector<FunctionalPtr> parts, double weight)
    : Functional(weight), parts_(std::move(parts))
{}

Evaluation SumFunctional::evaluate_unweighted(const GridDensity& mu, WarmStart*) const
{
    Evaluation out{0.0, GridFunction(mu.grid())};
    for (const auto& p : parts_) {
        Evaluation e = p->evaluate(mu, nullptr);
        out.value += e.value;
        out.fv += e.fv;
    }
    return out;
}

Objective::Objective(std::vector<FunctionalPtr> components, double tau)
    : comps_(std::move(components)), tau_(tau)
{
    if (!(tau >= 0.0))
        throw Error(Errc::InvalidTau, "diffusivity must be nonnegative", tau);
}

Objective::Eval Objective::evaluate(const GridDensity& mu, Warm* warm) const
{
    if (warm && warm->size() != comps_.size())
        warm->resize(comps_.size());
    Eval e;
    e.g_fv = GridFunction(mu.grid());
    for (std::size_t c = 0; c < comps_.size(); ++c) {
        Evaluation ce = comps_[c]->evaluate(mu, warm ? &(*warm)[c] : nullptr);
        e.g_value += ce.value;
        e.g_fv += ce.fv;
    }
    e.g_fv.center();
    e.fv = e.g_fv;
    if (tau_ > 0.0) {
        if (mu.min() <= 0.0)
            throw Error(Errc::DegenerateDensity, "objective first variation needs a positive density", mu.min());
        e.entropy = entropy(mu);
        e.fv.add_scaled(tau_, log_density(mu));
        e.fv.center();
    }
    e.value = e.g_value + tau_ * e.entropy;
    return e;
}

GridFunction Objective::drift_potential(const GridDensity& mu, Warm* warm) const
{
    GridFunction g(mu.grid());
    for (std::size_t c = 0; c < comps_.size(); ++c)
        g += comps_[c]->evaluate(mu, warm ? &(*warm)[c] : nullptr).fv;
    return g.center();
}

GridFunction objective_first_variation(const Objective& obj, const GridDensity& mu)
{
    return obj.first_variation(mu);
}

GridDensity gibbs_density(const GridFunction& potential, double tau)
{
    if (!(tau > 0.0))
        throw Error(Errc::InvalidTau, "Gibbs density needs a positive diffusivity", tau);
    double lo = *std::min_element(potential.values().begin(), potential.values().end());
    GridFunction w(potential.grid());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::exp(-(potential[i] - lo) / tau);
    return GridDensity::normalize(w);
}

GridDensity proximal_gibbs(const Objective& obj, const GridDensity& mu)
{
    return gibbs_density(obj.drift_potential(mu), obj.tau());
}

MinimizeResult minimize_fixed_point(const Objective& obj, const TorusGrid& g, const MinimizeOptions& opt)
{
    return minimize_fixed_point(obj, GridDensity::uniform(g), opt);
}

MinimizeResult minimize_fixed_point(const Objective& obj, const GridDensity& start, const MinimizeOptions& opt)
{
    if (!(obj.tau() > 0.0))
        throw Error(Errc::InvalidTau, "fixed-point minimizer needs a positive diffusivity", obj.tau());
    auto warm = obj.make_warm();
    GridDensity mu = start;
    auto E = obj.evaluate(mu, &warm);
    double r = std::sqrt(weighted_gradient_norm2(E.fv, mu));
    double theta = opt.theta;
    int it = 0;
    while (r > opt.tol) {
        if (it >= opt.max_iter || theta < 1e-12)
            throw Error(Errc::NoConvergence, "proximal-Gibbs iteration did not reach tolerance", r);
        ++it;
        GridDensity nu = gibbs_density(E.g_fv, obj.tau());
        std::vector<double> v(mu.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (1.0 - theta) * mu[i] + theta * nu[i];
        GridDensity cand = GridDensity::normalize(mu.grid(), std::move(v));
        auto Ec = obj.evaluate(cand, &warm);
        double rc = std::sqrt(weighted_gradient_norm2(Ec.fv, cand));
        if (rc > r) {
            theta *= 0.5;
            continue;
        }
        mu = std::move(cand);
        E = std::move(Ec);
        r = rc;
    }
    return {mu, E.value, r, it, theta};
}

} // namespace mfl
