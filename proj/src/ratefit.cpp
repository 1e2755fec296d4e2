#include "mfl/ratefit.hpp"

#include <cmath>

#include "mfl/error.hpp"

namespace mfl {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w)
{
    const std::size_t n = x.size();
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = w.empty() ? 1.0 : w[i];
        sxx += wi * (x[i] - mx) * (x[i] - mx);
        sxy += wi * (x[i] - mx) * (y[i] - my);
        syy += wi * (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = w.empty() ? 1.0 : w[i];
        double e = y[i] - f.intercept - f.slope * x[i];
        ssr += wi * e * e;
    }
    f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& gap, theory::Regime regime,
                 const FitWindow& window, double kappa)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window.burn_in || t[i] > window.t_stop)
            continue;
        if (window.gap_floor > 0.0 && gap[i] < window.gap_floor)
            break;
        if (!(gap[i] > 0.0))
            throw Error(Errc::NonPositiveGap, "gap must be positive inside the fit window", gap[i]);
        x.push_back(t[i]);
        switch (regime) {
        case theory::Regime::exponential: y.push_back(std::log(gap[i])); break;
        case theory::Regime::reciprocal: y.push_back(1.0 / gap[i]); break;
        case theory::Regime::power: y.push_back(std::pow(gap[i], -1.0 / kappa)); break;
        }
    }
    if (x.size() < 20)
        throw Error(Errc::InsufficientData, "rate fit needs at least 20 post-burn-in samples", double(x.size()));
    LinearFit lf = least_squares(x, y);
    RateFit r;
    r.regime = regime;
    r.rate = regime == theory::Regime::exponential ? -lf.slope : lf.slope;
    r.intercept = lf.intercept;
    r.r2 = lf.r2;
    r.t_start = x.front();
    r.t_end = x.back();
    r.samples = x.size();
    r.kappa = kappa;
    return r;
}

RateFit rate_fit(const FlowTrace& trace, theory::Regime regime, const FitWindow& window, double kappa)
{
    std::vector<double> t, g;
    for (const auto& r : trace.rows) {
        t.push_back(r.t);
        g.push_back(r.gap);
    }
    return rate_fit(t, g, regime, window, kappa);
}

} // namespace mfl
