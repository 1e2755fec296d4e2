#include "mfl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "mfl/error.hpp"

namespace mfl {

namespace {

// The planner is not thread safe; execution through the new-array interface is.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans;

    fftw_plan get(const TorusGrid& g, bool forward)
    {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(g.dim(), g.n(), forward);
        auto it = plans.find(key);
        if (it != plans.end())
            return it->second;
        std::vector<double> r(g.size());
        std::vector<Complex> c(spectrum_size(g));
        auto* cp = reinterpret_cast<fftw_complex*>(c.data());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p;
        if (g.dim() == 1)
            p = forward ? fftw_plan_dft_r2c_1d(g.n(), r.data(), cp, flags)
                        : fftw_plan_dft_c2r_1d(g.n(), cp, r.data(), flags);
        else
            p = forward ? fftw_plan_dft_r2c_2d(g.n(), g.n(), r.data(), cp, flags)
                        : fftw_plan_dft_c2r_2d(g.n(), g.n(), cp, r.data(), flags);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

} // namespace

std::size_t spectrum_size(const TorusGrid& g)
{
    std::size_t half = std::size_t(g.n() / 2 + 1);
    return g.dim() == 1 ? half : std::size_t(g.n()) * half;
}

std::vector<Complex> rfft(const TorusGrid& g, const double* in)
{
    std::vector<double> r(in, in + g.size());
    std::vector<Complex> out(spectrum_size(g));
    fftw_execute_dft_r2c(cache().get(g, true), r.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

void irfft(const TorusGrid& g, const std::vector<Complex>& spec, double* out)
{
    std::vector<Complex> c(spec); // c2r overwrites its input
    fftw_execute_dft_c2r(cache().get(g, false), reinterpret_cast<fftw_complex*>(c.data()), out);
    const double s = 1.0 / double(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] *= s;
}

Convolver::Convolver(const GridFunction& kernel) : grid_(kernel.grid())
{
    multiplier_ = rfft(grid_, kernel.data());
    const double w = grid_.cell_volume();
    for (auto& c : multiplier_)
        c *= w;
}

void Convolver::apply(const double* in, double* out) const
{
    auto s = rfft(grid_, in);
    for (std::size_t k = 0; k < s.size(); ++k)
        s[k] *= multiplier_[k];
    irfft(grid_, s, out);
}

GridFunction Convolver::apply(const GridFunction& f) const
{
    require_same_grid(grid_, f.grid(), "Convolver::apply");
    GridFunction out(grid_);
    apply(f.data(), out.data());
    return out;
}

} // namespace mfl
