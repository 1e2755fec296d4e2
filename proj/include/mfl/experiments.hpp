#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfl/ratefit.hpp"
#include "mfl/spectrum.hpp"
#include "mfl/theory.hpp"
#include "mfl/trajectory.hpp"
#include "mfl/wgf.hpp"

namespace mfl::studies {

GridFunction cosine_field(const TorusGrid& g, double amplitude);  // a * sum_i cos(2 pi x_i)
// W(z) = -kappa sum_i cos(2 pi z_i)
GridFunction cosine_interaction(const TorusGrid& g, double kappa);

// mode-1 cosine amplitude 2 int mu cos(2 pi x_1)
double cosine_amplitude(const GridDensity& mu);

struct HeatFlowParams {
    int n = 256;
    double tau = 1.0;
    double t_end = 0.05;
    double amplitude = 0.5;
    double record_every = 1e-3;
    Scheme scheme = Scheme::fv_upwind;
};

struct HeatFlowResult {
    FlowTrace trace;
    double amplitude0 = 0.0;
    double amplitude = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    bool monotone = false;
    double mass_drift = 0.0;
    double seconds = 0.0;
};

HeatFlowResult heat_flow_study(const HeatFlowParams& p);

struct RateParams {
    int dim = 1;
    int n = 128;
    double kappa = 0.2;
    double tau = 1.2;
    double amplitude = 0.5;   // initial cosine perturbation
    double t_end = 1.0;
    double record_every = 2e-3;
    double gap_floor = 1e-11;
    Scheme scheme = Scheme::fv_sg;
};

struct RateResult {
    FlowTrace trace;
    double inf_F = 0.0;
    double tau_c = 0.0;
    double L = 0.0;
    theory::DensityEnvelope envelope;
    theory::RateCertificate certificate;
    RateFit fit;
    double seconds = 0.0;
};

RateResult rate_study(const RateParams& p);

struct KernelCheckParams {
    std::vector<double> Mbars{0.5, 1.0};
    std::vector<double> times{0.1, 0.25, 0.5};
    std::vector<double> starts{0.0, 0.25};
    std::size_t N = 200000;
    double dt = 1e-3;
    int bins = 24;          // over |y - x| <= 3 sqrt(t)
    double inflation = 3.0; // Wilson half-widths at z = 1
    std::uint64_t seed = 7;
};

struct KernelBucket {
    double Mbar, t, x, y_lo, y_hi;
    std::size_t count;
    double density, wilson_lo, wilson_hi, lower, upper;
    bool pass;
};

struct KernelCheckResult {
    std::vector<KernelBucket> buckets;
    double pass_fraction = 0.0;
    double seconds = 0.0;
    void write_csv(const std::string& path) const;
};

KernelCheckResult kernel_check_study(const KernelCheckParams& p);

// Wilson score interval for k successes out of N
std::pair<double, double> wilson_interval(std::size_t k, std::size_t N, double z = 1.0);

struct SandwichParams {
    double eps = 0.2;
    double Mstar = 2.0;
    double M = 1.05;
    double vbar = 0.2;        // v = vbar sin(2 pi x)
    double start_variance = 0.25;
    std::size_t N = 100000;
    double dt = 1e-3;
    double range = 2.0;       // fit over |x| <= range
    int bins = 32;
    std::uint64_t seed = 11;
};

struct SandwichResult {
    theory::GaussianSandwich params;
    double coefficient = 0.0;
    double r2 = 0.0;
    double subgaussian = 0.0;
    std::vector<double> x, neglog;
    double seconds = 0.0;
};

SandwichResult sandwich_study(const SandwichParams& p);

struct AfiParams {
    int n = 256;
    double amplitude = 0.1;
    std::vector<double> taus{0.2, 0.1, 0.05, 0.025};
};

struct AfiResult {
    std::vector<double> taus;
    std::vector<AfiSandwich> rows;
    double seconds = 0.0;
};

AfiResult afi_study(const AfiParams& p);

struct ApproxParams {
    int n = 128;
    double c = 0.05;          // G0 = c/2 <mu - rho, q_s * (mu - rho)>
    double s = 0.01;
    double rho_amplitude = 0.2;
    std::vector<double> taus{0.1, 0.05, 0.025};
};

struct ApproxResult {
    std::vector<double> taus, gap_afi, gap_entropy, bound;
    double fisher = 0.0;
    double slope_afi = 0.0;
    double slope_entropy = 0.0;
    double seconds = 0.0;
};

ApproxResult approx_study(const ApproxParams& p);

// the convex quadratic fit functional used above, as potential + interaction terms
std::vector<FunctionalPtr> quadratic_fit_terms(const GridDensity& rho, double c, double s);
double quadratic_fit_value(const GridDensity& mu, const GridDensity& rho, double c, double s);

struct TrajectoryParams {
    int T = 4;
    int n = 64;
    std::size_t samples = 10000;
    double sigma = 0.01;
    double tau = 0.1;
    double tau_true = 0.1;
    double potential = 0.5;  // V = a cos(2 pi x)
    double t_end = 3.0;
    double record_every = 0.02;
    double gap_floor = 1e-10;
    Scheme scheme = Scheme::fv_sg;
    std::uint64_t seed = 1;
};

struct TrajectoryRun {
    ChainTrace trace;
    double inf_F = 0.0;
    RateFit exponential;
    RateFit reciprocal;
};

struct TrajectoryResult {
    TrajectoryRun standard;
    TrajectoryRun debiased;
    double endpoint_defect = 0.0;  // max |F_std - F_deb - endpoint term|
    double seconds = 0.0;
};

TrajectoryResult trajectory_study(const TrajectoryParams& p);

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace mfl::studies
