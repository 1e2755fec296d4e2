#include "mfl/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/error.hpp"
#include "mfl/fft.hpp"
#include "mfl/functionals.hpp"

namespace mfl {

namespace {

int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

// full storage index -> index into the r2c half spectrum, with conjugation flag
std::size_t half_index(const TorusGrid& g, std::size_t idx, bool& conj)
{
    const int n = g.n();
    const int hn = n / 2 + 1;
    if (g.dim() == 1) {
        int i = int(idx);
        conj = i >= hn;
        return std::size_t(conj ? n - i : i);
    }
    int i = int(idx) / n, j = int(idx) % n;
    conj = j >= hn;
    if (conj) {
        i = (n - i) % n;
        j = n - j;
    }
    return std::size_t(i) * hn + j;
}

std::vector<Complex> to_half(const TorusGrid& g, const std::vector<double>& full)
{
    const int n = g.n();
    const int hn = n / 2 + 1;
    std::vector<Complex> half(spectrum_size(g));
    if (g.dim() == 1) {
        for (int i = 0; i < hn; ++i)
            half[i] = full[i];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < hn; ++j)
                half[std::size_t(i) * hn + j] = full[std::size_t(i) * n + j];
    }
    return half;
}

} // namespace

double KernelSpectrum::coefficient(int k1, int k2) const
{
    const int n = grid.n();
    auto idx = [n](int k) { return std::size_t(((k % n) + n) % n); };
    if (grid.dim() == 1)
        return coefficients[idx(k1)];
    return coefficients[idx(k1) * n + idx(k2)];
}

KernelSpectrum kernel_spectrum(const GridFunction& W)
{
    if (!is_even(W))
        throw Error(Errc::NotEven, "kernel spectrum needs an even kernel");
    const TorusGrid& g = W.grid();
    auto half = rfft(g, W.data());
    const double w = g.cell_volume();
    KernelSpectrum s;
    s.grid = g;
    s.modes.resize(g.size());
    s.coefficients.resize(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        bool conj = false;
        Complex c = half[half_index(g, idx, conj)] * w;
        s.max_imag = std::max(s.max_imag, std::abs(c.imag()));
        s.coefficients[idx] = c.real();
        if (g.dim() == 1)
            s.modes[idx] = {signed_mode(int(idx), g.n()), 0};
        else
            s.modes[idx] = {signed_mode(int(idx) / g.n(), g.n()), signed_mode(int(idx) % g.n(), g.n())};
    }
    if (s.max_imag > 1e-10 * std::max(1.0, W.max_abs()))
        throw Error(Errc::NotEven, "kernel spectrum is not real", s.max_imag);
    // transform roundoff
    const double floor = 1e-13 * std::max(1.0, W.max_abs());
    for (double& c : s.coefficients)
        if (std::abs(c) < floor)
            c = 0.0;
    for (std::size_t idx = 1; idx < g.size(); ++idx)
        s.negative_mass += std::max(-s.coefficients[idx], 0.0);
    s.threshold = 4.0 * s.negative_mass;
    return s;
}

double interaction_tau_threshold(const KernelSpectrum& s) { return s.threshold; }

double lipschitz_tau_bound(double L, const TorusGrid& g)
{
    if (!(L >= 0.0))
        throw Error(Errc::HypothesisViolated, "Lipschitz constant must be nonnegative", L);
    double diam = g.diameter();
    return L * diam * diam;
}

ConvexityCertificate fourier_certificate(const KernelSpectrum& s)
{
    ConvexityCertificate c;
    c.tau_bound = s.threshold;
    c.source = "fourier";
    c.negative_mass = s.negative_mass;
    c.diameter = s.grid.diameter();
    return c;
}

ConvexityCertificate lipschitz_certificate(double L, const TorusGrid& g)
{
    ConvexityCertificate c;
    c.tau_bound = lipschitz_tau_bound(L, g);
    c.source = "lipschitz";
    c.L = L;
    c.diameter = g.diameter();
    return c;
}

namespace {

GridFunction synthesize(const TorusGrid& g, const std::vector<double>& coeffs)
{
    std::vector<double> scaled(coeffs);
    const double inv = 1.0 / g.cell_volume();
    for (double& c : scaled)
        c *= inv;
    GridFunction out(g);
    irfft(g, to_half(g, scaled), out.data());
    return out;
}

} // namespace

GridFunction reconstruct_kernel(const KernelSpectrum& s) { return synthesize(s.grid, s.coefficients); }

KernelSplit split_kernel(const KernelSpectrum& s)
{
    std::vector<double> plus(s.coefficients.size(), 0.0), minus(s.coefficients.size(), 0.0);
    for (std::size_t k = 1; k < s.coefficients.size(); ++k) {
        plus[k] = std::max(s.coefficients[k], 0.0);
        minus[k] = std::max(-s.coefficients[k], 0.0);
    }
    return {s.coefficients[0], synthesize(s.grid, plus), synthesize(s.grid, minus)};
}

} // namespace mfl
