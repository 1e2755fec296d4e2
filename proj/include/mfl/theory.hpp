#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mfl::theory {

inline constexpr double kPoincareTorus = 0.15915494309189535;  // 1 / (2 pi)

// Lower and upper callables paired with the parameters they were built from.
struct BoundEnvelope {
    std::string claim;
    std::function<double(double t, const std::vector<double>& x, const std::vector<double>& y)> lower;
    std::function<double(double t, const std::vector<double>& x, const std::vector<double>& y)> upper;
    double valid_from = 0.0;
    std::map<std::string, double> params;
};

BoundEnvelope kernel_bounds_rd(double Mbar, int d);

struct TorusKernelBounds {
    double t_star = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};
TorusKernelBounds kernel_bounds_td(double Mbar, int d);

struct DensityEnvelope {
    double m = 0.0;
    double M = 0.0;
    double t0 = 0.0;
};
DensityEnvelope torus_density_envelope(double L, double tau, int d);

enum class Regime { exponential, reciprocal, power };
std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);

struct RateCertificate {
    Regime regime = Regime::exponential;
    double rate = 0.0;   // exponential rate, reciprocal slope or power-law rate
    double burn_in = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double C = 0.0;
    double C_P = kPoincareTorus;
    double kappa = 1.0;
    double margin = 0.0;  // tau - tau_c
    std::map<std::string, double> inputs;
};

RateCertificate compact_rates(double m, double M, double tau, double tau_c, int d, double volume = 1.0);

double variance_change_constant(double sigma1, double sigma2, double p, int d);
double poly_constant(double sigma1, double sigma2, int d);

struct GaussianSandwich {
    double T_eps = 0.0;
    double lower_exponent = 0.0;  // 1 + eps
    double upper_exponent = 0.0;  // 1 - eps
};
GaussianSandwich gaussian_sandwich_params(double eps, double Mstar, double M);

double theorem13_burn_in(double alpha, double M0, double tau);

struct ScaledPoint {
    double time = 0.0;           // s for forward, t for inverse
    std::vector<double> x;       // y for forward, x for inverse
    double density_factor = 1.0; // nu_s(y) = factor * mu_t(x)
};
// confined time t and position x -> pure-drift time s and position y
ScaledPoint scaling_forward(double t, const std::vector<double>& x);
ScaledPoint scaling_inverse(double s, const std::vector<double>& y);

// bounds on the confined transition density p(t, x1, x2) obtained from the pure-drift ones
BoundEnvelope confined_kernel_bounds(double M, int d);

} // namespace mfl::theory
