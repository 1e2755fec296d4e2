#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfl/functionals.hpp"
#include "mfl/kernels.hpp"
#include "mfl/wgf.hpp"

namespace mfl {

enum class Domain { line, torus };

struct ParticleEnsemble {
    int dim = 1;
    Domain domain = Domain::line;
    std::vector<double> positions;  // N x dim, row-major
    double time = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return positions.size() / std::size_t(dim); }
    void write_csv(const std::string& path) const;
    // sidecar with seed and parameters
    void write_metadata(const std::string& path, const std::string& extra_json = "{}") const;
};

// x0 law: fills the initial position of particle `index`
using InitialLaw = std::function<void(std::uint64_t index, double* x)>;
InitialLaw point_law(std::vector<double> x0);
InitialLaw gaussian_law(int dim, double mean, double variance, std::uint64_t seed);
InitialLaw uniform_torus_law(int dim, std::uint64_t seed);

struct SdeOptions {
    double t_end = 1.0;
    double dt = 1e-3;
    std::size_t N = 10000;
    std::uint64_t seed = 1;
    int dim = 1;
    kernels::Exec exec = kernels::Exec::parallel;
};

// dX = (v(t, X) - X) dt + dB with sup |v| <= Mbar checked on probes
ParticleEnsemble simulate_confined_sde(const kernels::LineDrift& v, double Mbar, const InitialLaw& x0,
                                       const SdeOptions& opt);
// dY = b(t, Y) dt + dB
ParticleEnsemble simulate_drift_sde(const kernels::LineDrift& b, double Mbar, const InitialLaw& x0,
                                    const SdeOptions& opt);

struct MflOptions {
    std::size_t N = 10000;
    double dt = 1e-3;
    double t_end = 1.0;
    std::uint64_t seed = 1;
    double record_every = 0.05;
    kernels::Exec exec = kernels::Exec::parallel;
};

struct MflResult {
    ParticleEnsemble ensemble;
    FlowTrace trace;  // objective evaluated on the smoothed histogram
};

GridDensity smoothed_histogram(const ParticleEnsemble& ens, const TorusGrid& g);

// dX = -grad G'[mu_h](X) dt + sqrt(2 tau) dB on the torus
MflResult simulate_mfl_torus(const Objective& obj, const TorusGrid& g, const InitialLaw& x0, const MflOptions& opt,
                             std::optional<double> inf_F = std::nullopt);

GridDensity histogram_density(const ParticleEnsemble& ens, const TorusGrid& g);

double subgaussian_check(const ParticleEnsemble& ens, double M0);

} // namespace mfl
