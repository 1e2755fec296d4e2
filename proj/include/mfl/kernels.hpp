#pragma once

// Data-parallel inner loops. Each kernel has a serial reference path and an
// OpenMP path that must agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <functional>

#include "mfl/grid.hpp"

namespace mfl::kernels {

enum class Exec { serial, parallel };

enum class FluxScheme {
    upwind,           // upwinded advection + centered diffusion
    exponential_fit,  // Scharfetter-Gummel flux, exact discrete Gibbs equilibria
};

// Deterministic blocked sum: block partials are combined in a fixed order.
double sum(Exec ex, const double* x, std::size_t n);
double dot(Exec ex, const double* x, const double* y, std::size_t n);

// max over faces of |P_{i+1} - P_i| / h
double max_face_speed(const TorusGrid& g, const double* potential);

// Worst-case fraction of a cell's mass leaving it in one step of length dt.
double outflow_fraction(const TorusGrid& g, FluxScheme s, const double* potential, double tau, double dt);

// One explicit finite-volume step of d_t mu = div(mu grad P) + tau lap mu.
void fv_update(Exec ex, const TorusGrid& g, FluxScheme s, const double* mu, const double* potential,
               double tau, double dt, double* out);

void direct_convolution(Exec ex, const TorusGrid& g, const double* f, const double* k, double* out);

// Nearest-grid-point counts of torus positions (row-major N x d).
void deposit_ngp(Exec ex, const TorusGrid& g, const double* pos, std::size_t N, std::uint64_t* counts);

// Langevin step on the torus, drift read by linear interpolation of per-axis grid fields.
void langevin_torus_step(Exec ex, const TorusGrid& g, const double* const* drift_fields, double tau,
                         double dt, std::uint64_t seed, std::uint64_t step, double* pos, std::size_t N);

using LineDrift = std::function<double(double t, const double* x, int axis)>;

// Euler-Maruyama step of dX = (b(t,X) - confinement*X) dt + dB on R^d.
void line_sde_step(Exec ex, int d, const LineDrift& b, double confinement, double t, double dt,
                   std::uint64_t seed, std::uint64_t step, double* pos, std::size_t N);

} // namespace mfl::kernels
