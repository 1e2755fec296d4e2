#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfl/eot.hpp"
#include "mfl/functionals.hpp"
#include "mfl/particles.hpp"
#include "mfl/wgf.hpp"

namespace mfl {

enum class Variant { standard, debiased };
std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

struct TrajectoryProblem {
    int T = 1;
    std::vector<GridDensity> observations;  // T + 1 snapshots
    double sigma = 0.01;
    double tau = 0.1;
    Variant variant = Variant::standard;

    const TorusGrid& grid() const { return observations.front().grid(); }
    void validate() const;
};

using Chain = std::vector<GridDensity>;

struct ChainEvaluation {
    double value = 0.0;
    double fit = 0.0;        // (1/(T+1)) sum Fit
    double transport = 0.0;  // T sum T_{tau/T}
    double entropy = 0.0;    // sum tau_i H(mu_i)
    std::vector<double> entropies;
    std::vector<GridFunction> g_fv;  // per-marginal G' (fit + couplings)
    std::vector<GridFunction> fv;    // per-marginal F'
    int sinkhorn_iterations = 0;
};

struct ChainWarm {
    std::vector<GridFunction> psi;
    long uses = 0;
};

class ChainObjective {
public:
    explicit ChainObjective(TrajectoryProblem p, SinkhornOptions sk = {1e-11, 10000, nullptr});

    const TrajectoryProblem& problem() const { return p_; }
    const std::vector<double>& diffusivities() const { return taus_; }
    ChainEvaluation evaluate(const Chain& chain, ChainWarm* warm = nullptr) const;
    double value(const Chain& chain) const { return evaluate(chain).value; }
    Chain uniform_chain() const;

private:
    TrajectoryProblem p_;
    SinkhornOptions sk_;
    std::vector<double> taus_;
    std::vector<FitFunctional> fits_;
};

ChainObjective build_objective(const TrajectoryProblem& p);

double chain_dissipation(const ChainEvaluation& e, const Chain& chain);

struct ChainMinimum {
    Chain chain;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

ChainMinimum minimize_chain(const ChainObjective& obj, const Chain& start, const MinimizeOptions& opt = {});

struct ChainRecord {
    FlowRecord flow;
    double other_value = 0.0;  // the other variant on the same chain
    double endpoint_term = 0.0;  // (tau/2)(H(mu_0) + H(mu_T))
};

struct ChainTrace {
    std::vector<ChainRecord> rows;
    Chain final_chain;
    long steps = 0;
    double burn_in = 0.0;
    double lipschitz = 0.0;

    void write_csv(const std::string& path) const;
};

ChainTrace coupled_flow(const ChainObjective& obj, const Chain& start, const FlowConfig& cfg,
                        std::optional<double> inf_F = std::nullopt, bool record_other = true);

// Torus Langevin particles in potential V at diffusivity tau_true, snapshots at times i/T.
TrajectoryProblem generate_synthetic(const GridFunction& V, double tau_true, int T, std::size_t n_samples,
                                     double sigma_obs, std::uint64_t seed, const InitialLaw& x0 = {},
                                     double dt = 1e-3);

void write_problem(const std::string& path, const TrajectoryProblem& p);
TrajectoryProblem read_problem(const std::string& path);

} // namespace mfl
