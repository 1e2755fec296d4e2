#include "mfl/theory.hpp"

#include <cmath>

#include "mfl/error.hpp"

namespace mfl::theory {

namespace {

double dist(const std::vector<double>& x, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

double gaussian(double t, double r, int d) { return std::pow(2.0 * M_PI * t, -0.5 * d) * std::exp(-r * r / (2.0 * t)); }

} // namespace

BoundEnvelope kernel_bounds_rd(double Mbar, int d)
{
    if (!(Mbar >= 0.0))
        throw Error(Errc::HypothesisViolated, "drift bound must be nonnegative", Mbar);
    BoundEnvelope e;
    e.claim = "two-sided transition density bound for a bounded drift on R^d";
    e.params = {{"Mbar", Mbar}, {"d", double(d)}};
    const double m2 = Mbar * Mbar;
    e.lower = [m2, d](double t, const std::vector<double>& x, const std::vector<double>& y) {
        double r = dist(x, y), a = r + 2.0 * std::sqrt(t);
        return std::exp(-m2 * a * a - m2 * t) / std::sqrt(2.0) * gaussian(t, r, d);
    };
    e.upper = [m2, d](double t, const std::vector<double>& x, const std::vector<double>& y) {
        double r = dist(x, y), a = r + 2.0 * std::sqrt(t);
        return std::exp(m2 * a * a) * std::sqrt(2.0) * gaussian(t, r, d);
    };
    return e;
}

TorusKernelBounds kernel_bounds_td(double Mbar, int d)
{
    if (!(Mbar >= 0.0))
        throw Error(Errc::HypothesisViolated, "drift bound must be nonnegative", Mbar);
    TorusKernelBounds b;
    b.t_star = 1.0 / std::max(8.0 * Mbar * Mbar, 1.0);
    b.lower = std::exp(-1.5 * Mbar * Mbar * d) / (5.0 * std::pow(3.0, d));
    b.upper = 4.0 * std::pow(2.0, d);
    return b;
}

DensityEnvelope torus_density_envelope(double L, double tau, int d)
{
    if (!(tau > 0.0) || !(L >= tau))
        throw Error(Errc::HypothesisViolated, "density envelope needs L >= tau > 0", L - tau);
    const double r = L / tau;
    DensityEnvelope e;
    e.m = std::exp(-0.375 * r * r * d) * std::pow(r, d) * std::pow(std::sqrt(2.0) / 3.0, d) / 5.0;
    e.M = 4.0 * std::pow(2.0 * std::sqrt(2.0), d) * std::pow(r, d);
    e.t0 = tau / (4.0 * L * L);
    return e;
}

std::string regime_name(Regime r)
{
    switch (r) {
    case Regime::exponential: return "exponential";
    case Regime::reciprocal: return "reciprocal";
    case Regime::power: return "power";
    }
    return "?";
}

Regime parse_regime(const std::string& s)
{
    if (s == "exponential")
        return Regime::exponential;
    if (s == "reciprocal")
        return Regime::reciprocal;
    if (s == "power")
        return Regime::power;
    throw Error(Errc::ConfigError, "unknown regime " + s);
}

RateCertificate compact_rates(double m, double M, double tau, double tau_c, int d, double volume)
{
    if (tau < tau_c)
        throw Error(Errc::InvalidRegime, "diffusivity below the convexity threshold", tau - tau_c);
    if (!(m > 0.0) || !(M >= m) || !(volume > 0.0))
        throw Error(Errc::HypothesisViolated, "envelope constants must satisfy 0 < m <= M");
    RateCertificate c;
    const double cp2 = c.C_P * c.C_P;
    c.c1 = 8.0 * m * M_PI * M_PI / M;
    c.c2 = m * M_PI * M_PI / (M * M);
    c.margin = tau - tau_c;
    if (tau > tau_c) {
        c.regime = Regime::exponential;
        c.rate = 2.0 * c.margin * m / (M * cp2);
    } else {
        c.regime = Regime::reciprocal;
        c.rate = m / (4.0 * M * M * volume * cp2);
    }
    c.inputs = {{"m", m}, {"M", M}, {"tau", tau}, {"tau_c", tau_c}, {"d", double(d)}, {"volume", volume}};
    return c;
}

double variance_change_constant(double sigma1, double sigma2, double p, int d)
{
    const double alpha = sigma1 * sigma1 / (sigma2 * sigma2);
    if (!(p > 1.0) || !(alpha > 1.0 / p))
        throw Error(Errc::HypothesisViolated, "variance change needs p > 1 and alpha > 1/p", alpha);
    return std::pow(alpha, 0.5 * d) * std::pow((p - 1.0) / (p * alpha - 1.0), d * (p - 1.0) / (2.0 * p));
}

double poly_constant(double sigma1, double sigma2, int d)
{
    if (!(sigma1 > 0.0) || sigma2 < sigma1 || sigma2 >= std::sqrt(2.0) * sigma1)
        throw Error(Errc::HypothesisViolated, "poly constant needs sigma1 <= sigma2 < sqrt(2) sigma1", sigma2 / sigma1);
    const double alpha = sigma2 * sigma2 / (sigma1 * sigma1);
    return std::pow(2.0 * alpha - alpha * alpha, -0.5 * d);
}

GaussianSandwich gaussian_sandwich_params(double eps, double Mstar, double M)
{
    if (!(eps > 0.0 && eps < 0.25) || !(Mstar >= 2.0) || !(M > Mstar / 2.0))
        throw Error(Errc::HypothesisViolated, "sandwich needs 0 < eps < 1/4, M* >= 2, M > M*/2", eps);
    return {std::log(40.0 * Mstar * Mstar / eps) + eps / 16.0, 1.0 + eps, 1.0 - eps};
}

double theorem13_burn_in(double alpha, double M0, double tau)
{
    if (!(alpha > 0.0) || !(M0 > 0.0) || !(tau > 0.0))
        throw Error(Errc::HypothesisViolated, "burn-in needs positive alpha, M0, tau");
    return (5.0 + std::log(M0 * M0 * alpha / tau)) / alpha;
}

ScaledPoint scaling_forward(double t, const std::vector<double>& x)
{
    if (!(t >= 0.0))
        throw Error(Errc::InvalidTime, "scaling transform needs t >= 0", t);
    ScaledPoint p;
    p.time = 0.5 * std::expm1(2.0 * t);
    p.x = x;
    const double e = std::exp(t);
    for (double& v : p.x)
        v *= e;
    p.density_factor = std::exp(-double(x.size()) * t);
    return p;
}

ScaledPoint scaling_inverse(double s, const std::vector<double>& y)
{
    if (!(s >= 0.0))
        throw Error(Errc::InvalidTime, "scaling transform needs s >= 0", s);
    ScaledPoint p;
    p.time = 0.5 * std::log1p(2.0 * s);
    p.x = y;
    const double e = std::exp(-p.time);
    for (double& v : p.x)
        v *= e;
    p.density_factor = std::exp(double(y.size()) * p.time);
    return p;
}

BoundEnvelope confined_kernel_bounds(double M, int d)
{
    BoundEnvelope rd = kernel_bounds_rd(M, d);
    BoundEnvelope e;
    e.claim = "confined transition density p(t, x1, x2) = e^{dt} q(s, x1, e^t x2)";
    e.params = {{"M", M}, {"d", double(d)}};
    auto lift = [](const decltype(rd.lower)& f) {
        return [f](double t, const std::vector<double>& x1, const std::vector<double>& x2) {
            ScaledPoint y2 = scaling_forward(t, x2);
            return f(y2.time, x1, y2.x) / y2.density_factor;
        };
    };
    e.lower = lift(rd.lower);
    e.upper = lift(rd.upper);
    return e;
}

} // namespace mfl::theory
