#pragma once

#include <limits>
#include <vector>

#include "mfl/theory.hpp"
#include "mfl/wgf.hpp"

namespace mfl {

struct RateFit {
    theory::Regime regime = theory::Regime::exponential;
    double rate = 0.0;  // -slope of log gap, slope of 1/gap, or slope of gap^{-1/kappa}
    double intercept = 0.0;
    double r2 = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t samples = 0;
    double kappa = 1.0;
};

struct FitWindow {
    double burn_in = 0.0;
    double t_stop = std::numeric_limits<double>::infinity();
    double gap_floor = 0.0;  // window ends before the first gap below this value
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w = {});

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& gap, theory::Regime regime,
                 const FitWindow& window, double kappa = 1.0);
RateFit rate_fit(const FlowTrace& trace, theory::Regime regime, const FitWindow& window, double kappa = 1.0);

} // namespace mfl
