#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mfl/fft.hpp"
#include "mfl/grid.hpp"

namespace mfl {

// Potentials carried between evaluations of the same functional (Sinkhorn warm starts).
struct WarmStart {
    std::vector<GridFunction> potentials;
    long uses = 0;
};

struct Evaluation {
    double value = 0.0;
    GridFunction fv;  // first variation, mean-zero
};

class Functional {
public:
    explicit Functional(double weight = 1.0) : weight_(weight) {}
    virtual ~Functional() = default;

    virtual std::string kind() const = 0;
    double weight() const { return weight_; }

    Evaluation evaluate(const GridDensity& mu, WarmStart* warm = nullptr) const;
    double value(const GridDensity& mu) const { return evaluate(mu).value; }
    GridFunction first_variation(const GridDensity& mu) const { return evaluate(mu).fv; }

protected:
    virtual Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart* warm) const = 0;

private:
    double weight_;
};

using FunctionalPtr = std::shared_ptr<const Functional>;

class PotentialEnergy final : public Functional {
public:
    explicit PotentialEnergy(GridFunction V, double weight = 1.0);
    std::string kind() const override { return "potential"; }
    const GridFunction& potential() const { return V_; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart*) const override;

private:
    GridFunction V_;
};

// (mu) -> int int W(y - x) dmu dmu
class InteractionEnergy final : public Functional {
public:
    explicit InteractionEnergy(GridFunction W, double weight = 1.0);
    std::string kind() const override { return "interaction"; }
    const GridFunction& kernel() const { return W_; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart*) const override;

private:
    GridFunction W_;
    Convolver conv_;
};

// -int log(mu * q_sigma) d rho_hat, with q_sigma the heat kernel at time sigma
class FitFunctional final : public Functional {
public:
    FitFunctional(GridDensity rho_hat, double sigma, double weight = 1.0);
    std::string kind() const override { return "fit"; }
    double sigma() const { return sigma_; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart*) const override;

private:
    GridDensity rho_;
    double sigma_;
    const Convolver* q_;
};

class EntropyFunctional final : public Functional {
public:
    explicit EntropyFunctional(double weight = 1.0) : Functional(weight) {}
    std::string kind() const override { return "entropy"; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart*) const override;
};

class SumFunctional final : public Functional {
public:
    explicit SumFunctional(std::vector<FunctionalPtr> parts, double weight = 1.0);
    std::string kind() const override { return "sum"; }
    const std::vector<FunctionalPtr>& parts() const { return parts_; }

protected:
    Evaluation evaluate_unweighted(const GridDensity& mu, WarmStart*) const override;

private:
    std::vector<FunctionalPtr> parts_;
};

Evaluation potential_value_and_fv(const GridFunction& V, const GridDensity& mu);
Evaluation interaction_value_and_fv(const GridFunction& W, const GridDensity& mu);
Evaluation fit_value_and_fv(const GridDensity& rho_hat, double sigma, const GridDensity& mu);

// W(z) = W(-z) coordinatewise on the grid
bool is_even(const GridFunction& W, double tol = 1e-12);

// cached q(t, .) convolution operator, shared across threads
const Convolver& heat_convolver(double t, const TorusGrid& g);

// sum |grad_h f|^2 mu h^d with centered differences
double weighted_gradient_norm2(const GridFunction& f, const GridDensity& mu);

// F = G + tau H
class Objective {
public:
    using Warm = std::vector<WarmStart>;

    struct Eval {
        double value = 0.0;     // F
        double g_value = 0.0;   // G
        double entropy = 0.0;   // H
        GridFunction g_fv;      // G'
        GridFunction fv;        // F' = G' + tau log mu
    };

    Objective(std::vector<FunctionalPtr> components, double tau);

    double tau() const { return tau_; }
    const std::vector<FunctionalPtr>& components() const { return comps_; }
    Warm make_warm() const { return Warm(comps_.size()); }

    Eval evaluate(const GridDensity& mu, Warm* warm = nullptr) const;
    double value(const GridDensity& mu) const { return evaluate(mu).value; }
    GridFunction first_variation(const GridDensity& mu) const { return evaluate(mu).fv; }
    GridFunction drift_potential(const GridDensity& mu, Warm* warm = nullptr) const;

private:
    std::vector<FunctionalPtr> comps_;
    double tau_;
};

GridFunction objective_first_variation(const Objective& obj, const GridDensity& mu);

GridDensity gibbs_density(const GridFunction& potential, double tau);
GridDensity proximal_gibbs(const Objective& obj, const GridDensity& mu);

struct MinimizeOptions {
    double tol = 1e-11;
    int max_iter = 5000;
    double theta = 0.5;
};

struct MinimizeResult {
    GridDensity density;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double theta = 0.0;
};

// damped proximal-Gibbs fixed point, mu <- (1 - theta) mu + theta prox(mu)
MinimizeResult minimize_fixed_point(const Objective& obj, const TorusGrid& g, const MinimizeOptions& opt = {});
MinimizeResult minimize_fixed_point(const Objective& obj, const GridDensity& start, const MinimizeOptions& opt = {});

} // namespace mfl
