#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toml.hpp"

#include "mfl/error.hpp"
#include "mfl/experiments.hpp"
#include "mfl/particles.hpp"
#include "mfl/ratefit.hpp"
#include "mfl/report.hpp"
#include "mfl/spectrum.hpp"
#include "mfl/theory.hpp"
#include "mfl/trajectory.hpp"
#include "mfl/wgf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mfl;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit : int { exit_ok = 0, exit_assertion = 2, exit_config = 3 };

// Typed access to one experiment table. Every key read is echoed into the manifest;
// keys never read are reported as configuration errors.
class Params {
public:
    explicit Params(const toml::table& t) : t_(t) {}

    double num(const std::string& key, double def)
    {
        double v = def;
        if (auto node = t_.get(key)) {
            auto x = node->value<double>();
            if (!x)
                fail(key, "expected a number");
            v = *x;
        }
        echo_[key] = v;
        return v;
    }

    long integer(const std::string& key, long def)
    {
        long v = def;
        if (auto node = t_.get(key)) {
            auto x = node->value<int64_t>();
            if (!x)
                fail(key, "expected an integer");
            v = long(*x);
        }
        echo_[key] = v;
        return v;
    }

    std::string str(const std::string& key, const std::string& def)
    {
        std::string v = def;
        if (auto node = t_.get(key)) {
            auto x = node->value<std::string>();
            if (!x)
                fail(key, "expected a string");
            v = *x;
        }
        echo_[key] = v;
        return v;
    }

    std::vector<double> list(const std::string& key, std::vector<double> def)
    {
        if (auto node = t_.get(key)) {
            auto* arr = node->as_array();
            if (!arr || arr->empty())
                fail(key, "expected a non-empty array of numbers");
            def.clear();
            for (const auto& e : *arr) {
                auto x = e.value<double>();
                if (!x)
                    fail(key, "expected a non-empty array of numbers");
                def.push_back(*x);
            }
        }
        echo_[key] = def;
        return def;
    }

    void finish(const std::set<std::string>& ignored = {}) const
    {
        for (const auto& [k, v] : t_) {
            std::string key(k.str());
            if (!echo_.contains(key) && !ignored.count(key))
                throw Error(Errc::ConfigError, "unknown key '" + key + "'");
        }
    }

    const json& echo() const { return echo_; }
    json& echo() { return echo_; }

private:
    [[noreturn]] static void fail(const std::string& key, const std::string& what)
    {
        throw Error(Errc::ConfigError, "key '" + key + "': " + what);
    }

    const toml::table& t_;
    json echo_ = json::object();
};

struct Options {
    fs::path out;
    std::optional<std::uint64_t> seed;
    bool svg = false;
};

struct Outcome {
    json results = json::object();
    json assertions = json::array();
    std::vector<std::string> files;

    void check(const std::string& name, bool pass, const std::string& detail)
    {
        assertions.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    }
    bool passed() const
    {
        return std::all_of(assertions.begin(), assertions.end(), [](const json& a) { return a["pass"].get<bool>(); });
    }
};

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::uint64_t seed_of(Params& p, const Options& o, long def)
{
    long s = p.integer("seed", def);
    return o.seed ? *o.seed : std::uint64_t(s);
}

Scheme scheme_of(Params& p, Scheme def)
{
    try {
        return parse_scheme(p.str("scheme", scheme_name(def)));
    } catch (const Error& e) {
        throw Error(Errc::ConfigError, e.what());
    }
}

struct ObjectiveSpec {
    TorusGrid grid;
    Objective objective;
    double amplitude;
    bool heat;
};

// grid + objective G = int V dmu + 1/2 <W * mu, mu>, V = a sum cos, W = -kappa sum cos
ObjectiveSpec objective_of(Params& p)
{
    const int dim = int(p.integer("dim", 1));
    const int n = int(p.integer("n", dim == 1 ? 128 : 32));
    const double tau = p.num("tau", 1.0);
    const double potential = p.num("potential", 0.0);
    const double kappa = p.num("kappa", 0.0);
    const double amplitude = p.num("amplitude", 0.5);
    TorusGrid g(dim, n);
    std::vector<FunctionalPtr> parts;
    if (potential != 0.0)
        parts.push_back(std::make_shared<PotentialEnergy>(studies::cosine_field(g, potential)));
    if (kappa != 0.0)
        parts.push_back(std::make_shared<InteractionEnergy>(studies::cosine_interaction(g, kappa)));
    bool heat = parts.empty();
    return {g, Objective(std::move(parts), tau), amplitude, heat};
}

GridDensity initial_density(const TorusGrid& g, double a)
{
    return GridDensity::tabulate(g, [a](const Point& x) { return 1.0 + a * std::cos(2 * M_PI * x[0]); });
}

void trace_plot(const Options& o, Outcome& out, const std::string& name, const FlowTrace& tr, bool gap)
{
    if (!o.svg)
        return;
    report::Series s{gap ? "gap" : "F", {}, {}};
    for (const auto& r : tr.rows) {
        if (gap && !(r.gap > 0.0))
            continue;
        s.x.push_back(r.t);
        s.y.push_back(gap ? r.gap : r.F);
    }
    report::write_svg((o.out / name).string(), {name, "t", gap ? "F - inf F" : "F", gap}, {s});
    out.files.push_back(name);
}

void run_flow_experiment(Params& p, const Options& o, Outcome& out)
{
    auto spec = objective_of(p);
    FlowConfig cfg;
    cfg.t_end = p.num("t_end", 0.5);
    cfg.record_every = p.num("record_every", 0.01);
    cfg.scheme = scheme_of(p, Scheme::fv_sg);
    cfg.snapshot_every = p.num("snapshot_every", 0.0);
    const double mass_tol = p.num("mass_tolerance", 1e-12);
    p.finish();

    auto mu0 = initial_density(spec.grid, spec.amplitude);
    std::optional<double> inf;
    if (!spec.heat) {
        MinimizeOptions mo;
        mo.tol = 1e-12;
        mo.max_iter = 100000;
        inf = minimize_fixed_point(spec.objective, spec.grid, mo).value;
    } else {
        inf = 0.0;
    }
    auto tr = run_flow(mu0, spec.objective, cfg, inf);
    tr.write_csv((o.out / "trace.csv").string());
    write_grid((o.out / "final_density.grid").string(), tr.final_density.function());
    out.files.insert(out.files.end(), {"trace.csv", "final_density.grid"});
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        std::string name = "snapshot_" + std::to_string(k) + ".grid";
        write_grid((o.out / name).string(), tr.snapshots[k].function());
        out.files.push_back(name);
    }
    trace_plot(o, out, "F.svg", tr, false);
    trace_plot(o, out, "gap.svg", tr, true);

    bool monotone = true;
    for (std::size_t k = 1; k < tr.rows.size(); ++k)
        monotone = monotone && tr.rows[k].F <= tr.rows[k - 1].F + 1e-12 * (1 + std::abs(tr.rows[k - 1].F));
    const double drift = std::abs(tr.final_mass - tr.initial_mass);
    out.results = {{"steps", tr.steps}, {"final_F", tr.rows.back().F}, {"inf_F", *inf},
                   {"mass_drift", drift}, {"burn_in", tr.burn_in}, {"lipschitz", tr.lipschitz}};
    out.check("F nonincreasing", monotone, "records " + std::to_string(tr.rows.size()));
    out.check("mass conserved", drift <= mass_tol, fmt("drift %.3g", drift));
    out.check("positivity", tr.final_density.min() > 0.0, fmt("min density %.3g", tr.final_density.min()));
    if (spec.heat && spec.grid.dim() == 1) {
        double a1 = studies::cosine_amplitude(tr.final_density);
        double pred = spec.amplitude * std::exp(-4 * M_PI * M_PI * spec.objective.tau() * cfg.t_end);
        double rel = pred > 0 ? std::abs(a1 - pred) / pred : std::abs(a1);
        out.results["mode1_rel_error"] = rel;
        out.check("heat mode decay", rel <= 5e-3, fmt("relative error %.3g", rel));
    }
}

void run_particles(Params& p, const Options& o, Outcome& out)
{
    auto spec = objective_of(p);
    MflOptions mo;
    mo.N = std::size_t(p.integer("N", 10000));
    mo.dt = p.num("dt", 1e-3);
    mo.t_end = p.num("t_end", 1.0);
    mo.record_every = p.num("record_every", 0.05);
    mo.seed = seed_of(p, o, 1);
    const double w1_tol = p.num("w1_tolerance", 0.05);
    p.finish();

    MinimizeOptions opt;
    opt.tol = 1e-11;
    opt.max_iter = 100000;
    auto ref = minimize_fixed_point(spec.objective, spec.grid, opt);
    auto law = uniform_torus_law(spec.grid.dim(), mo.seed ^ 0x9e3779b97f4a7c15ULL);
    auto r = simulate_mfl_torus(spec.objective, spec.grid, law, mo, ref.value);
    r.trace.write_csv((o.out / "trace.csv").string());
    r.ensemble.write_csv((o.out / "ensemble.csv").string());
    r.ensemble.write_metadata((o.out / "ensemble.meta.json").string(), p.echo().dump());
    out.files.insert(out.files.end(), {"trace.csv", "ensemble.csv", "ensemble.meta.json"});
    trace_plot(o, out, "F.svg", r.trace, false);

    bool wrapped = std::all_of(r.ensemble.positions.begin(), r.ensemble.positions.end(),
                               [](double x) { return std::isfinite(x) && x >= 0.0 && x < 1.0; });
    auto hist = histogram_density(r.ensemble, spec.grid);
    out.results = {{"inf_F", ref.value}, {"final_F", r.trace.rows.back().F}, {"N", mo.N}};
    out.check("positions wrapped", wrapped, "torus [0,1)^d");
    if (spec.grid.dim() == 1) {
        double w1 = w1_circle(hist, ref.density);
        out.results["w1_to_minimizer"] = w1;
        out.check("histogram near minimizer", w1 <= w1_tol, fmt("W1 %.4g <= %.4g", w1, w1_tol));
    }
}

void run_kernel_check(Params& p, const Options& o, Outcome& out)
{
    studies::KernelCheckParams k;
    k.Mbars = p.list("Mbars", k.Mbars);
    k.times = p.list("times", k.times);
    k.starts = p.list("starts", k.starts);
    k.N = std::size_t(p.integer("N", long(k.N)));
    k.dt = p.num("dt", k.dt);
    k.bins = int(p.integer("bins", k.bins));
    k.inflation = p.num("inflation", k.inflation);
    k.seed = seed_of(p, o, long(k.seed));
    const double need = p.num("min_pass_fraction", 0.99);
    p.finish();

    auto r = studies::kernel_check_study(k);
    r.write_csv((o.out / "buckets.csv").string());
    out.files.push_back("buckets.csv");
    if (o.svg) {
        for (double M : k.Mbars) {
            report::Series d{"density", {}, {}}, lo{"lower", {}, {}}, hi{"upper", {}, {}};
            for (const auto& b : r.buckets) {
                if (b.Mbar != M || b.t != k.times.back() || b.x != k.starts.front())
                    continue;
                double y = 0.5 * (b.y_lo + b.y_hi);
                d.x.push_back(y), d.y.push_back(b.density);
                lo.x.push_back(y), lo.y.push_back(b.lower);
                hi.x.push_back(y), hi.y.push_back(b.upper);
            }
            std::string name = "kernel_M" + report::format_number(M) + ".svg";
            report::write_svg((o.out / name).string(), {name, "y", "p(t, x, y)", true}, {d, lo, hi});
            out.files.push_back(name);
        }
    }
    out.results = {{"buckets", r.buckets.size()}, {"pass_fraction", r.pass_fraction}};
    out.check("kernel bounds", r.pass_fraction >= need, fmt("pass fraction %.4f >= %.4f", r.pass_fraction, need));
}

void run_sandwich(Params& p, const Options& o, Outcome& out)
{
    studies::SandwichParams s;
    s.eps = p.num("eps", s.eps);
    s.Mstar = p.num("Mstar", s.Mstar);
    s.M = p.num("M", s.M);
    s.vbar = p.num("vbar", s.vbar);
    s.start_variance = p.num("start_variance", s.start_variance);
    s.N = std::size_t(p.integer("N", long(s.N)));
    s.dt = p.num("dt", s.dt);
    s.range = p.num("range", s.range);
    s.bins = int(p.integer("bins", s.bins));
    s.seed = seed_of(p, o, long(s.seed));
    const double lo = p.num("coefficient_min", 0.8), hi = p.num("coefficient_max", 1.2);
    const double r2 = p.num("min_r2", 0.99);
    p.finish();

    auto r = studies::sandwich_study(s);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.x.size(); ++i)
        rows.push_back({r.x[i], r.neglog[i]});
    report::write_csv((o.out / "profile.csv").string(), {"x", "neg_log_density"}, rows);
    out.files.push_back("profile.csv");
    if (o.svg) {
        report::write_svg((o.out / "profile.svg").string(), {"-log density", "x", "-log p", false},
                          {{"empirical", r.x, r.neglog}});
        out.files.push_back("profile.svg");
    }
    out.results = {{"T_eps", r.params.T_eps}, {"coefficient", r.coefficient}, {"r2", r.r2},
                   {"subgaussian", r.subgaussian}};
    out.check("initial law subgaussian", r.subgaussian <= 2.0, fmt("E exp(x^2/M*^2) = %.4g", r.subgaussian));
    out.check("quadratic coefficient", r.coefficient >= lo && r.coefficient <= hi,
              fmt("%.4f in range", r.coefficient));
    out.check("quadratic fit quality", r.r2 >= r2, fmt("R2 %.4f >= %.4f", r.r2, r2));
}

void run_afi(Params& p, const Options& o, Outcome& out)
{
    studies::AfiParams a;
    a.n = int(p.integer("n", a.n));
    a.amplitude = p.num("amplitude", a.amplitude);
    a.taus = p.list("taus", a.taus);
    p.finish();

    auto r = studies::afi_study(a);
    std::vector<std::vector<double>> rows;
    bool sandwich = true, ordered = true;
    for (std::size_t i = 0; i < r.taus.size(); ++i) {
        const auto& s = r.rows[i];
        rows.push_back({r.taus[i], s.mid, s.upper, s.ratio});
        sandwich = sandwich && s.mid >= -1e-8 && s.mid <= s.upper + 1e-8;
        if (i > 0)
            ordered = ordered && s.ratio >= r.rows[i - 1].ratio - 1e-12;
    }
    report::write_csv((o.out / "afi.csv").string(), {"tau", "afi", "upper", "ratio"}, rows);
    out.files.push_back("afi.csv");
    if (o.svg) {
        report::Series s{"ratio", {}, {}};
        for (const auto& row : rows)
            s.x.push_back(row[0]), s.y.push_back(row[3]);
        report::write_svg((o.out / "afi.svg").string(), {"AFI / upper", "tau", "ratio", false}, {s});
        out.files.push_back("afi.svg");
    }
    out.results = {{"last_ratio", r.rows.back().ratio}};
    out.check("sandwich", sandwich, "0 <= AFI <= tau^2 I / 8");
    out.check("ratio increases as tau decreases", ordered, fmt("last ratio %.4f", r.rows.back().ratio));
}

void run_spectrum(Params& p, const Options& o, Outcome& out)
{
    const int dim = int(p.integer("dim", 1));
    const int n = int(p.integer("n", 64));
    auto modes = p.list("modes", {-0.2});
    const double tau = p.num("tau", 0.0);
    p.finish();

    TorusGrid g(dim, n);
    auto W = GridFunction::tabulate(g, [&](const Point& x) {
        double s = 0.0;
        for (std::size_t k = 0; k < modes.size(); ++k)
            for (int a = 0; a < dim; ++a)
                s += modes[k] * std::cos(2 * M_PI * double(k + 1) * x[a]);
        return s;
    });
    auto s = kernel_spectrum(W);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.modes.size(); ++i)
        rows.push_back({double(s.modes[i][0]), double(s.modes[i][1]), s.coefficients[i]});
    report::write_csv((o.out / "spectrum.csv").string(), {"k1", "k2", "coefficient"}, rows);
    out.files.push_back("spectrum.csv");
    auto back = reconstruct_kernel(s);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(back[i] - W[i]));
    auto cert = fourier_certificate(s);
    out.results = {{"threshold", s.threshold}, {"negative_mass", s.negative_mass}, {"max_imag", s.max_imag},
                   {"reconstruction_error", err}};
    out.check("reconstruction", err <= 1e-10, fmt("max error %.3g", err));
    if (tau > 0.0) {
        out.results["tau"] = tau;
        out.results["certified_convex"] = tau >= cert.tau_bound;
    }
}

void run_traj(Params& p, const Options& o, Outcome& out)
{
    studies::TrajectoryParams t;
    t.T = int(p.integer("T", t.T));
    t.n = int(p.integer("n", t.n));
    t.samples = std::size_t(p.integer("samples", long(t.samples)));
    t.sigma = p.num("sigma", t.sigma);
    t.tau = p.num("tau", t.tau);
    t.tau_true = p.num("tau_true", t.tau_true);
    t.potential = p.num("potential", t.potential);
    t.t_end = p.num("t_end", t.t_end);
    t.record_every = p.num("record_every", t.record_every);
    t.gap_floor = p.num("gap_floor", t.gap_floor);
    t.scheme = scheme_of(p, t.scheme);
    t.seed = seed_of(p, o, long(t.seed));
    const double defect_tol = p.num("max_endpoint_defect", 1e-10);
    p.finish();

    auto r = studies::trajectory_study(t);
    r.standard.trace.write_csv((o.out / "standard.csv").string());
    r.debiased.trace.write_csv((o.out / "debiased.csv").string());
    out.files.insert(out.files.end(), {"standard.csv", "debiased.csv"});
    for (std::size_t i = 0; i < r.standard.trace.final_chain.size(); ++i) {
        std::string name = "marginal_" + std::to_string(i) + ".grid";
        write_grid((o.out / name).string(), r.standard.trace.final_chain[i].function());
        out.files.push_back(name);
    }
    if (o.svg) {
        std::vector<report::Series> ss;
        for (const auto* run : {&r.standard, &r.debiased}) {
            report::Series s{run == &r.standard ? "standard" : "debiased", {}, {}};
            for (const auto& row : run->trace.rows)
                if (row.flow.gap > 0.0)
                    s.x.push_back(row.flow.t), s.y.push_back(row.flow.gap);
            ss.push_back(s);
        }
        report::write_svg((o.out / "gaps.svg").string(), {"chain objective gap", "t", "F - inf F", true}, ss);
        out.files.push_back("gaps.svg");
    }
    auto fit_json = [](const RateFit& f) {
        return json{{"regime", theory::regime_name(f.regime)}, {"rate", f.rate}, {"r2", f.r2},
                    {"t_start", f.t_start}, {"t_end", f.t_end}, {"samples", f.samples}};
    };
    out.results = {{"standard", {{"inf_F", r.standard.inf_F}, {"exponential", fit_json(r.standard.exponential)},
                                 {"reciprocal", fit_json(r.standard.reciprocal)}}},
                   {"debiased", {{"inf_F", r.debiased.inf_F}, {"exponential", fit_json(r.debiased.exponential)},
                                 {"reciprocal", fit_json(r.debiased.reciprocal)}}},
                   {"endpoint_defect", r.endpoint_defect}};
    out.check("variants differ by the endpoint entropies", r.endpoint_defect <= defect_tol,
              fmt("defect %.3g <= %.3g", r.endpoint_defect, defect_tol));
}

void run_rates(Params& p, const Options& o, Outcome& out)
{
    studies::RateParams r;
    r.dim = int(p.integer("dim", r.dim));
    r.n = int(p.integer("n", r.n));
    r.kappa = p.num("kappa", r.kappa);
    r.tau = p.num("tau", r.tau);
    r.amplitude = p.num("amplitude", r.amplitude);
    r.t_end = p.num("t_end", r.t_end);
    r.record_every = p.num("record_every", r.record_every);
    r.gap_floor = p.num("gap_floor", r.gap_floor);
    r.scheme = scheme_of(p, r.scheme);
    const double min_r2 = p.num("min_r2", 0.9);
    p.finish();

    auto res = studies::rate_study(r);
    res.trace.write_csv((o.out / "trace.csv").string());
    out.files.push_back("trace.csv");
    trace_plot(o, out, "gap.svg", res.trace, true);
    report::write_csv((o.out / "certificate.csv").string(),
                      {"tau", "tau_c", "L", "m", "M", "t0", "c1", "c2", "certified_rate", "fitted_rate", "r2"},
                      {{r.tau, res.tau_c, res.L, res.envelope.m, res.envelope.M, res.envelope.t0, res.certificate.c1,
                        res.certificate.c2, res.certificate.rate, res.fit.rate, res.fit.r2}});
    out.files.push_back("certificate.csv");
    out.results = {{"tau_c", res.tau_c},
                   {"regime", theory::regime_name(res.certificate.regime)},
                   {"certified_rate", res.certificate.rate},
                   {"fitted_rate", res.fit.rate},
                   {"r2", res.fit.r2},
                   {"window", {res.fit.t_start, res.fit.t_end}}};
    out.check("fitted rate above certificate", res.fit.rate >= res.certificate.rate,
              fmt("%.4g >= %.4g", res.fit.rate, res.certificate.rate));
    out.check("fit quality", res.fit.r2 >= min_r2, fmt("R2 %.4f >= %.4f", res.fit.r2, min_r2));
}

void run_bounds(Params& p, const Options& o, Outcome& out)
{
    const int d = int(p.integer("dim", 1));
    const double Mbar = p.num("Mbar", 1.0);
    const double tau = p.num("tau", 1.0);
    const double L = p.num("L", 2.0);
    const double tau_c = p.num("tau_c", tau);
    p.finish();

    auto td = theory::kernel_bounds_td(Mbar, d);
    auto env = theory::torus_density_envelope(L, tau, d);
    auto cert = theory::compact_rates(env.m, env.M, tau, tau_c, d);
    out.results = {{"kernel_td", {{"t_star", td.t_star}, {"lower", td.lower}, {"upper", td.upper}}},
                   {"envelope", {{"m", env.m}, {"M", env.M}, {"t0", env.t0}}},
                   {"certificate",
                    {{"regime", theory::regime_name(cert.regime)}, {"rate", cert.rate}, {"c1", cert.c1},
                     {"c2", cert.c2}, {"burn_in", cert.burn_in}}}};
    std::ofstream((o.out / "bounds.json")) << out.results.dump(2) << "\n";
    out.files.push_back("bounds.json");
}

using Runner = std::function<void(Params&, const Options&, Outcome&)>;

const std::map<std::string, Runner>& runners()
{
    static const std::map<std::string, Runner> r{
        {"flow", run_flow_experiment}, {"mfl-particles", run_particles}, {"kernel-check", run_kernel_check},
        {"sandwich", run_sandwich}, {"afi", run_afi},                 {"spectrum", run_spectrum},
        {"traj", run_traj},         {"rates", run_rates},             {"bounds", run_bounds}};
    return r;
}

bool is_config_error(Errc c)
{
    switch (c) {
    case Errc::ConfigError:
    case Errc::InvalidGrid:
    case Errc::InvalidTau:
    case Errc::InvalidSigma:
    case Errc::InvalidTime:
    case Errc::DimensionUnsupported:
    case Errc::HypothesisViolated:
    case Errc::InvalidRegime:
    case Errc::NotEven:
        return true;
    default:
        return false;
    }
}

int run_one(const std::string& kind, const fs::path& config, const Options& base)
{
    Options o = base;
    json manifest{{"kind", kind}, {"config", config.string()}, {"version", kVersion}};
    auto finish = [&](int code, const std::string& status) {
        manifest["status"] = status;
        manifest["exit_code"] = code;
        std::error_code ec;
        fs::create_directories(o.out, ec);
        std::ofstream(o.out / "manifest.json") << manifest.dump(2) << "\n";
        return code;
    };
    toml::table tbl;
    try {
        tbl = toml::parse_file(config.string());
    } catch (const toml::parse_error& e) {
        std::cerr << config << ": " << e.description() << "\n";
        manifest["error"] = std::string(e.description());
        return finish(exit_config, "config error");
    }
    // an optional [kind] table scopes the parameters
    const toml::table* t = &tbl;
    if (auto* sub = tbl[kind].as_table())
        t = sub;
    if (auto k = tbl["kind"].value<std::string>(); k && *k != kind) {
        std::cerr << config << ": config is for '" << *k << "', not '" << kind << "'\n";
        manifest["error"] = "kind mismatch";
        return finish(exit_config, "config error");
    }
    Params p(*t);
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::set<std::string> ignored{"kind", kind};
        p.str("kind", kind);
        fs::create_directories(o.out);
        runners().at(kind)(p, o, out);
        p.finish(ignored);
    } catch (const Error& e) {
        manifest["parameters"] = p.echo();
        manifest["error"] = e.what();
        std::cerr << kind << ": " << e.what() << "\n";
        if (is_config_error(e.code()))
            return finish(exit_config, "config error");
        out.check(errc_name(e.code()), false, e.what());
    }
    manifest["parameters"] = p.echo();
    if (o.seed)
        manifest["seed_override"] = *o.seed;
    manifest["results"] = out.results;
    manifest["assertions"] = out.assertions;
    manifest["files"] = out.files;
    manifest["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& a : out.assertions)
        std::cout << kind << " " << (a["pass"].get<bool>() ? "PASS " : "FAIL ") << a["name"].get<std::string>()
                  << ": " << a["detail"].get<std::string>() << "\n";
    return out.passed() ? finish(exit_ok, "pass") : finish(exit_assertion, "assertion failure");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Experiments for mean-field Langevin and Wasserstein gradient flows"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::vector<std::string> configs;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool svg = false;
    for (const auto& [name, runner] : runners()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", configs, "TOML configuration file(s)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_option("--jobs", jobs, "experiments run concurrently")->check(CLI::PositiveNumber);
        sub->add_flag("--emit-svg", svg, "write SVG plots");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    const std::string kind = app.get_subcommands().front()->get_name();

    std::vector<int> codes(configs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < configs.size();) {
            Options o;
            o.seed = seed;
            o.svg = svg;
            o.out = configs.size() == 1 ? fs::path(out_dir) : fs::path(out_dir) / fs::path(configs[i]).stem();
            codes[i] = run_one(kind, configs[i], o);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(jobs, configs.size()); ++k)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (std::find(codes.begin(), codes.end(), int(exit_config)) != codes.end())
        return exit_config;
    if (std::find(codes.begin(), codes.end(), int(exit_assertion)) != codes.end())
        return exit_assertion;
    return exit_ok;
}
