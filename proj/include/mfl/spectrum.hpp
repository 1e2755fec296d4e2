#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfl/grid.hpp"

namespace mfl {

// Fourier coefficients W_k = int W(z) exp(-2 i pi k.z) dz, |k|_inf <= n/2.
struct KernelSpectrum {
    TorusGrid grid;
    std::vector<std::array<int, 2>> modes;  // signed wavenumbers, grid storage order
    std::vector<double> coefficients;
    double max_imag = 0.0;
    double negative_mass = 0.0;  // sum over k != 0 of (W_k)_-
    double threshold = 0.0;      // 4 * negative_mass

    double coefficient(int k1, int k2 = 0) const;
};

struct ConvexityCertificate {
    double tau_bound = 0.0;
    std::string source;  // "fourier" | "lipschitz"
    double L = 0.0;
    double diameter = 0.0;
    double negative_mass = 0.0;
};

KernelSpectrum kernel_spectrum(const GridFunction& W);
double interaction_tau_threshold(const KernelSpectrum& s);
double lipschitz_tau_bound(double L, const TorusGrid& g);

ConvexityCertificate fourier_certificate(const KernelSpectrum& s);
ConvexityCertificate lipschitz_certificate(double L, const TorusGrid& g);

// inverse transform of the spectrum
GridFunction reconstruct_kernel(const KernelSpectrum& s);

struct KernelSplit {
    double mean = 0.0;   // W_0
    GridFunction plus;   // positive-definite part
    GridFunction minus;  // W = W_0 + plus - minus
};
KernelSplit split_kernel(const KernelSpectrum& s);

} // namespace mfl
