#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mfl/eot.hpp"
#include "mfl/error.hpp"
#include "mfl/experiments.hpp"
#include "mfl/theory.hpp"

using namespace mfl;
using namespace mfl::studies;

namespace {

int failures = 0;

void line(const char* id, bool ok, const std::string& detail)
{
    std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void guarded(const char* id, const std::function<void()>& body)
{
    try {
        body();
    } catch (const Error& e) {
        line(id, false, std::string("error ") + errc_name(e.code()) + ": " + e.what());
    } catch (const std::exception& e) {
        line(id, false, std::string("exception: ") + e.what());
    }
}

void ac1()
{
    auto r = heat_flow_study({});
    bool ok = r.rel_error <= 5e-3 && r.monotone && r.mass_drift <= 1e-13 && r.seconds < 10.0;
    line("AC1", ok,
         fmt("heat flow: amplitude rel err %.2e (<=5e-3), F monotone %s, mass drift %.1e (<=1e-13), %.1fs (<10s)",
             r.rel_error, r.monotone ? "yes" : "no", r.mass_drift, r.seconds));
}

void ac2()
{
    RateParams p;
    p.tau = 1.2;
    auto a = rate_study(p);
    p.tau = 1.6;
    auto b = rate_study(p);
    double ratio = a.fit.rate / a.certificate.rate;
    bool ok = a.certificate.regime == theory::Regime::exponential && ratio >= 0.9 && b.fit.rate > a.fit.rate &&
              a.seconds + b.seconds < 120.0;
    line("AC2", ok,
         fmt("exponential regime: tau_c %.3f, L %.3f, measured rate %.3f vs certificate %.4g (ratio %.1f >= 0.9), "
             "R2 %.4f; rate(1.6) %.3f > rate(1.2) %.3f; %.1fs",
             a.tau_c, a.L, a.fit.rate, a.certificate.rate, ratio, a.fit.r2, b.fit.rate, a.fit.rate,
             a.seconds + b.seconds));
}

void ac3()
{
    RateParams p;
    p.tau = 0.8;
    p.t_end = 2.0;
    auto r = rate_study(p);
    bool ok = r.certificate.regime == theory::Regime::reciprocal && r.fit.rate >= r.certificate.rate &&
              r.fit.r2 >= 0.98 && r.seconds < 120.0;
    line("AC3", ok,
         fmt("reciprocal regime at tau = tau_c = %.3f: 1/gap slope %.4g vs c2 %.4g, R2 %.4f (>=0.98) on [%.4f, %.4f], "
             "%zu samples; %.1fs",
             r.tau_c, r.fit.rate, r.certificate.rate, r.fit.r2, r.fit.t_start, r.fit.t_end, r.fit.samples,
             r.seconds));
}

void ac4()
{
    auto r = kernel_check_study({});
    bool ok = r.pass_fraction >= 0.99 && r.seconds < 180.0;
    line("AC4", ok,
         fmt("kernel bounds: %zu buckets, pass fraction %.4f (>=0.99); %.1fs", r.buckets.size(), r.pass_fraction,
             r.seconds));
}

void ac5()
{
    SandwichParams p;
    auto r = sandwich_study(p);
    bool ok = r.coefficient >= 1.0 - p.eps && r.coefficient <= 1.0 + p.eps && r.r2 >= 0.99 && r.seconds < 120.0;
    line("AC5", ok,
         fmt("gaussian sandwich at T_eps %.4f: quadratic coefficient %.4f in [%.2f, %.2f], R2 %.4f (>=0.99); %.1fs",
             r.params.T_eps, r.coefficient, 1.0 - p.eps, 1.0 + p.eps, r.r2, r.seconds));
}

void ac6()
{
    auto r = afi_study({});
    bool ok = r.seconds < 60.0;
    std::string d;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& s = r.rows[i];
        ok = ok && s.mid >= -1e-8 && s.mid <= s.upper + 1e-8;
        if (i > 0)
            ok = ok && s.ratio >= r.rows[i - 1].ratio;
        d += fmt("tau %.3f ratio %.4f; ", r.taus[i], s.ratio);
    }
    ok = ok && !r.rows.empty() && r.rows.back().ratio >= 0.8;
    line("AC6", ok, "afi sandwich: " + d + fmt("%.1fs", r.seconds));
}

void ac7()
{
    auto r = approx_study({});
    bool ok = r.slope_afi >= 1.7 && r.slope_entropy <= 1.3 && r.seconds < 300.0;
    std::string d;
    for (std::size_t i = 0; i < r.taus.size(); ++i) {
        ok = ok && r.gap_afi[i] <= r.bound[i];
        d += fmt("tau %.3f gap %.3e <= %.3e; ", r.taus[i], r.gap_afi[i], r.bound[i]);
    }
    line("AC7", ok,
         "approximation error: " + d +
             fmt("slope afi %.3f (>=1.7), entropy %.3f (<=1.3); %.1fs", r.slope_afi, r.slope_entropy, r.seconds));
}

void ac8()
{
    auto r = trajectory_study({});
    bool ok = r.standard.exponential.r2 >= 0.95 && r.debiased.reciprocal.r2 >= 0.95 && r.endpoint_defect <= 1e-10 &&
              r.seconds < 600.0;
    line("AC8", ok,
         fmt("trajectory: standard log-gap R2 %.4f (rate %.3f), debiased 1/gap R2 %.4f (slope %.3g), "
             "endpoint defect %.1e (<=1e-10); %.1fs",
             r.standard.exponential.r2, r.standard.exponential.rate, r.debiased.reciprocal.r2,
             r.debiased.reciprocal.rate, r.endpoint_defect, r.seconds));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void ac9()
{
    using namespace mfl::theory;
    double worst = 0.0;
    auto check = [&](double got, double want) { worst = std::max(worst, rel(got, want)); };
    // envelope: direct transcription
    for (double L : {1.0, 2.0, 3.5})
        for (double tau : {0.5, 1.0})
            for (int d : {1, 2}) {
                if (L < tau)
                    continue;
                auto e = torus_density_envelope(L, tau, d);
                double r = L / tau;
                check(e.m, std::pow(std::sqrt(2.0) * r / 3.0, d) * std::exp(-3.0 * d * r * r / 8.0) / 5.0);
                check(e.M, 4.0 * std::pow(2.0 * std::sqrt(2.0) * r, d));
                check(e.t0, tau / (4.0 * L * L));
                auto c = compact_rates(e.m, e.M, tau + 0.1, tau, d);
                const double cp = 1.0 / (2.0 * M_PI);
                check(c.c1, 2.0 * e.m / (e.M * cp * cp));
                check(c.c2, e.m / (4.0 * e.M * e.M * cp * cp));
            }
    for (double Mb : {0.0, 0.5, 1.0, 2.0}) {
        auto k = kernel_bounds_td(Mb, 1);
        check(k.t_star, 1.0 / std::max(1.0, 8.0 * Mb * Mb));
        check(k.lower, std::exp(-1.5 * Mb * Mb) / 15.0);
        check(k.upper, 8.0);
    }
    for (double eps : {0.05, 0.1, 0.2})
        check(gaussian_sandwich_params(eps, 2.0, 1.5).T_eps, std::log(160.0 / eps) + eps / 16.0);
    check(theorem13_burn_in(2.0, 1.0, 0.5), (5.0 + std::log(4.0)) / 2.0);

    // Gaussian comparison constants against trapezoidal quadrature, plus the variance inequality
    double ineq = 0.0;
    {
        auto gauss = [](double x, double s) { return std::exp(-x * x / (2 * s * s)) / std::sqrt(2 * M_PI * s * s); };
        auto integrate = [](const std::function<double(double)>& f) {
            const int m = 40000;
            const double a = 60.0, hx = 2 * a / m;
            double q = 0.0;
            for (int i = 0; i <= m; ++i)
                q += ((i == 0 || i == m) ? 0.5 : 1.0) * hx * f(-a + i * hx);
            return q;
        };
        for (double s2 : {1.0, 1.1, 1.3}) {
            const double s1 = 1.0;
            check(poly_constant(s1, s2, 1),
                  integrate([&](double x) { return gauss(x, s2) * gauss(x, s2) / gauss(x, s1); }));
        }
        for (double p : {1.5, 2.0, 3.0})
            for (double s2 : {1.0, 1.1, 1.15}) {
                const double s1 = 1.0, q = p / (p - 1.0);
                double Cq = integrate([&](double x) { return std::pow(gauss(x, s2) / gauss(x, s1), q) * gauss(x, s1); });
                double C = variance_change_constant(s1, s2, p, 1);
                check(C, std::pow(Cq, 1.0 / q));
                std::function<double(double)> tests[] = {[](double x) { return x; }, [](double x) { return x * x; }};
                for (auto& f : tests) {
                    double m1 = integrate([&](double x) { return f(x) * gauss(x, s1); });
                    double m2 = integrate([&](double x) { return f(x) * gauss(x, s2); });
                    double var = integrate([&](double x) { return (f(x) - m2) * (f(x) - m2) * gauss(x, s2); });
                    double lp = integrate([&](double x) { return std::pow(std::abs(f(x) - m1), 2 * p) * gauss(x, s1); });
                    double rhs = C * std::pow(lp, 1.0 / p);
                    ineq = std::max(ineq, var / rhs);
                }
            }
    }
    bool ok = worst <= 1e-9 && ineq <= 1.0;
    line("AC9", ok,
         fmt("formula regression: worst relative error %.2e (<=1e-9), max Var/(C |f-m1|^2) %.4f (<=1) for f = x, x^2",
             worst, ineq));
}

void ac10()
{
    TorusGrid g(1, 32);
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.2, 1.8);
    std::vector<std::pair<std::string, FunctionalPtr>> fs;
    GridFunction V = cosine_field(g, 0.7);
    GridFunction W = cosine_interaction(g, 0.3);
    auto rho = GridDensity::tabulate(g, [](const Point& x) { return 1.0 + 0.4 * std::sin(2 * M_PI * x[0]); });
    fs.push_back({"potential", std::make_shared<PotentialEnergy>(V)});
    fs.push_back({"interaction", std::make_shared<InteractionEnergy>(W)});
    fs.push_back({"fit", std::make_shared<FitFunctional>(rho, 0.02)});
    fs.push_back({"entropy", std::make_shared<EntropyFunctional>()});
    SinkhornOptions so;
    so.tol = 1e-14;
    fs.push_back({"self-transport", std::make_shared<SelfTransport>(0.1, 1.0, so)});

    // central differences; roundoff-level errors count as order 2
    auto order_of = [](const std::function<double(double)>& err) {
        double e1 = err(1e-2), e2 = err(5e-3);
        if (e1 < 1e-9 && e2 < 1e-9)
            return 2.0;
        return std::log(e1 / e2) / std::log(2.0);
    };
    double worst = 1e9;
    std::string worst_name;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(g.size()), b(g.size());
        for (auto& x : a)
            x = u(gen);
        for (auto& x : b)
            x = u(gen);
        auto mu = GridDensity::normalize(g, a);
        auto nu = GridDensity::normalize(g, b);
        for (auto& [name, f] : fs) {
            auto fv = f->first_variation(mu);
            double dd = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                dd += fv[i] * (nu[i] - mu[i]) * g.cell_volume();
            auto err = [&](double e) {
                std::vector<double> m(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    m[i] = mu[i] + e * (nu[i] - mu[i]);
                std::vector<double> mm(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    mm[i] = mu[i] - e * (nu[i] - mu[i]);
                return std::abs((f->value(GridDensity::adopt(g, m, 1e-9)) - f->value(GridDensity::adopt(g, mm, 1e-9))) /
                                    (2.0 * e) -
                                dd);
            };
            double o = order_of(err);
            if (o < worst) {
                worst = o;
                worst_name = name;
            }
        }
        // trajectory chain marginals
        std::vector<GridDensity> obs{rho, mu, nu};
        for (Variant v : {Variant::standard, Variant::debiased}) {
            TrajectoryProblem p;
            p.T = 2;
            p.observations = obs;
            p.sigma = 0.02;
            p.tau = 0.1;
            p.variant = v;
            ChainObjective obj(p, {1e-14, 20000, nullptr});
            Chain c{mu, nu, rho};
            Chain dir{nu, rho, mu};
            auto E = obj.evaluate(c);
            for (int k = 0; k < 3; ++k) {
                double dd = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    dd += E.fv[k][i] * (dir[k][i] - c[k][i]) * g.cell_volume();
                auto err = [&](double e) {
                    Chain cc = c;
                    std::vector<double> m(g.size());
                    for (std::size_t i = 0; i < g.size(); ++i)
                        m[i] = c[k][i] + e * (dir[k][i] - c[k][i]);
                    cc[k] = GridDensity::adopt(g, m, 1e-9);
                    double up = obj.value(cc);
                    for (std::size_t i = 0; i < g.size(); ++i)
                        m[i] = c[k][i] - e * (dir[k][i] - c[k][i]);
                    cc[k] = GridDensity::adopt(g, m, 1e-9);
                    return std::abs((up - obj.value(cc)) / (2.0 * e) - dd);
                };
                double o = order_of(err);
                if (o < worst) {
                    worst = o;
                    worst_name = "trajectory-" + variant_name(v);
                }
            }
        }
    }
    line("AC10", worst >= 1.0,
         fmt("first variations: worst finite-difference order %.3f (>=1) for %s over 20 random densities", worst,
             worst_name.c_str()));
}

} // namespace

int main(int argc, char** argv)
{
    std::string only = argc > 1 ? argv[1] : "";
    std::vector<std::pair<const char*, void (*)()>> all{{"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
                                                         {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
                                                         {"AC9", ac9}, {"AC10", ac10}};
    for (auto& [id, fn] : all)
        if (only.empty() || only == id)
            guarded(id, fn);
    return failures == 0 ? 0 : 1;
}
