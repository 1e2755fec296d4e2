#pragma once

#include <complex>
#include <vector>

#include "mfl/grid.hpp"

namespace mfl {

using Complex = std::complex<double>;

// half-spectrum length of a real transform on this grid
std::size_t spectrum_size(const TorusGrid& g);
std::vector<Complex> rfft(const TorusGrid& g, const double* in);
// normalized inverse of rfft
void irfft(const TorusGrid& g, const std::vector<Complex>& spec, double* out);

// Periodic convolution with a fixed kernel, (K*f)(x) = sum_j K(x - x_j) f(x_j) h^d.
class Convolver {
public:
    Convolver() = default;
    explicit Convolver(const GridFunction& kernel);

    const TorusGrid& grid() const { return grid_; }
    GridFunction apply(const GridFunction& f) const;
    void apply(const double* in, double* out) const;

private:
    TorusGrid grid_;
    std::vector<Complex> multiplier_;
};

} // namespace mfl
