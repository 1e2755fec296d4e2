#include "mfl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mfl/rng.hpp"

namespace mfl::kernels {

namespace {

constexpr std::size_t kBlock = 1024;

inline std::size_t wrap(long i, long n) { return std::size_t(((i % n) + n) % n); }

inline double bernoulli_fn(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 - 0.5 * x;
    return x / std::expm1(x);
}

// flux from cell a to its right neighbour b across one face
inline double face_flux(FluxScheme s, double a, double b, double dP, double tau, double h)
{
    if (s == FluxScheme::upwind) {
        double v = -dP / h;
        double adv = v > 0 ? v * a : v * b;
        return adv - tau * (b - a) / h;
    }
    if (tau == 0.0) {
        double v = -dP / h;
        return v > 0 ? v * a : v * b;
    }
    double x = dP / tau;
    return tau / h * (bernoulli_fn(x) * a - bernoulli_fn(-x) * b);
}

// coefficients of mu_c in the right-face outflow and left-face outflow
inline double out_coef(FluxScheme s, double dP_right, double dP_left, double tau, double h)
{
    if (s == FluxScheme::upwind) {
        double vr = -dP_right / h, vl = -dP_left / h;
        return std::max(vr, 0.0) + std::max(-vl, 0.0) + 2.0 * tau / h;
    }
    if (tau == 0.0)
        return std::max(-dP_right / h, 0.0) + std::max(dP_left / h, 0.0);
    return tau / h * (bernoulli_fn(dP_right / tau) + bernoulli_fn(-dP_left / tau));
}

template <class Body>
void for_cells(Exec ex, std::size_t n, Body&& body)
{
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < long(n); ++i)
            body(std::size_t(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
    }
}

} // namespace

double sum(Exec ex, const double* x, std::size_t n)
{
    std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> part(nb, 0.0);
    for_cells(ex, nb, [&](std::size_t b) {
        double s = 0.0;
        std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i)
            s += x[i];
        part[b] = s;
    });
    double s = 0.0;
    for (double p : part)
        s += p;
    return s;
}

double dot(Exec ex, const double* x, const double* y, std::size_t n)
{
    std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> part(nb, 0.0);
    for_cells(ex, nb, [&](std::size_t b) {
        double s = 0.0;
        std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i)
            s += x[i] * y[i];
        part[b] = s;
    });
    double s = 0.0;
    for (double p : part)
        s += p;
    return s;
}

double max_face_speed(const TorusGrid& g, const double* P)
{
    const long n = g.n();
    const double h = g.h();
    double m = 0.0;
    if (g.dim() == 1) {
        for (long i = 0; i < n; ++i)
            m = std::max(m, std::abs(P[wrap(i + 1, n)] - P[i]) / h);
        return m;
    }
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            double c = P[i * n + j];
            m = std::max(m, std::abs(P[wrap(i + 1, n) * n + j] - c) / h);
            m = std::max(m, std::abs(P[i * n + wrap(j + 1, n)] - c) / h);
        }
    return m;
}

double outflow_fraction(const TorusGrid& g, FluxScheme s, const double* P, double tau, double dt)
{
    const long n = g.n();
    const double h = g.h();
    double worst = 0.0;
    if (g.dim() == 1) {
        for (long i = 0; i < n; ++i) {
            double c = out_coef(s, P[wrap(i + 1, n)] - P[i], P[i] - P[wrap(i - 1, n)], tau, h);
            worst = std::max(worst, c);
        }
    } else {
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                double p = P[i * n + j];
                double c = out_coef(s, P[wrap(i + 1, n) * n + j] - p, p - P[wrap(i - 1, n) * n + j], tau, h)
                         + out_coef(s, P[i * n + wrap(j + 1, n)] - p, p - P[i * n + wrap(j - 1, n)], tau, h);
                worst = std::max(worst, c);
            }
    }
    return worst * dt / h;
}

void fv_update(Exec ex, const TorusGrid& g, FluxScheme s, const double* mu, const double* P, double tau,
               double dt, double* out)
{
    const long n = g.n();
    const double h = g.h();
    const double r = dt / h;
    if (g.dim() == 1) {
        for_cells(ex, std::size_t(n), [&](std::size_t ci) {
            long i = long(ci);
            std::size_t ip = wrap(i + 1, n), im = wrap(i - 1, n);
            double fr = face_flux(s, mu[i], mu[ip], P[ip] - P[i], tau, h);
            double fl = face_flux(s, mu[im], mu[i], P[i] - P[im], tau, h);
            out[i] = mu[i] - r * (fr - fl);
        });
        return;
    }
    for_cells(ex, std::size_t(n * n), [&](std::size_t c) {
        long i = long(c) / n, j = long(c) % n;
        std::size_t xp = wrap(i + 1, n) * n + j, xm = wrap(i - 1, n) * n + j;
        std::size_t yp = i * n + wrap(j + 1, n), ym = i * n + wrap(j - 1, n);
        double fxr = face_flux(s, mu[c], mu[xp], P[xp] - P[c], tau, h);
        double fxl = face_flux(s, mu[xm], mu[c], P[c] - P[xm], tau, h);
        double fyr = face_flux(s, mu[c], mu[yp], P[yp] - P[c], tau, h);
        double fyl = face_flux(s, mu[ym], mu[c], P[c] - P[ym], tau, h);
        out[c] = mu[c] - r * ((fxr - fxl) + (fyr - fyl));
    });
}

void direct_convolution(Exec ex, const TorusGrid& g, const double* f, const double* k, double* out)
{
    const long n = g.n();
    const double w = g.cell_volume();
    if (g.dim() == 1) {
        for_cells(ex, std::size_t(n), [&](std::size_t i) {
            double s = 0.0;
            for (long j = 0; j < n; ++j)
                s += k[wrap(long(i) - j, n)] * f[j];
            out[i] = s * w;
        });
        return;
    }
    for_cells(ex, std::size_t(n * n), [&](std::size_t c) {
        long i = long(c) / n, j = long(c) % n;
        double s = 0.0;
        for (long a = 0; a < n; ++a) {
            const double* krow = k + wrap(i - a, n) * n;
            const double* frow = f + a * n;
            for (long b = 0; b < n; ++b)
                s += krow[wrap(j - b, n)] * frow[b];
        }
        out[c] = s * w;
    });
}

void deposit_ngp(Exec ex, const TorusGrid& g, const double* pos, std::size_t N, std::uint64_t* counts)
{
    const int d = g.dim();
    const long n = g.n();
    auto cell_of = [&](std::size_t p) {
        std::size_t c = 0;
        for (int a = 0; a < d; ++a) {
            long i = long(std::floor(pos[p * d + a] * n + 0.5));
            c = c * std::size_t(n) + wrap(i, n);
        }
        return c;
    };
    std::fill(counts, counts + g.size(), 0);
    if (ex == Exec::serial) {
        for (std::size_t p = 0; p < N; ++p)
            ++counts[cell_of(p)];
        return;
    }
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(g.size(), 0);
#pragma omp for schedule(static)
        for (long p = 0; p < long(N); ++p)
            ++local[cell_of(std::size_t(p))];
#pragma omp critical
        for (std::size_t c = 0; c < g.size(); ++c)
            counts[c] += local[c];
    }
}

namespace {

inline double interp_periodic(const TorusGrid& g, const double* f, const double* x)
{
    const long n = g.n();
    if (g.dim() == 1) {
        double u = x[0] * n;
        long i = long(std::floor(u));
        double w = u - i;
        return (1 - w) * f[wrap(i, n)] + w * f[wrap(i + 1, n)];
    }
    double u = x[0] * n, v = x[1] * n;
    long i = long(std::floor(u)), j = long(std::floor(v));
    double wu = u - i, wv = v - j;
    std::size_t i0 = wrap(i, n), i1 = wrap(i + 1, n), j0 = wrap(j, n), j1 = wrap(j + 1, n);
    return (1 - wu) * ((1 - wv) * f[i0 * n + j0] + wv * f[i0 * n + j1])
         + wu * ((1 - wv) * f[i1 * n + j0] + wv * f[i1 * n + j1]);
}

inline double wrap_unit(double x)
{
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

} // namespace

void langevin_torus_step(Exec ex, const TorusGrid& g, const double* const* drift, double tau, double dt,
                         std::uint64_t seed, std::uint64_t step, double* pos, std::size_t N)
{
    const int d = g.dim();
    const double noise = std::sqrt(2.0 * tau * dt);
    for_cells(ex, N, [&](std::size_t p) {
        CounterRng rng(seed, p, step);
        std::normal_distribution<double> gauss;
        double* x = pos + p * d;
        double b[2];
        for (int a = 0; a < d; ++a)
            b[a] = interp_periodic(g, drift[a], x);
        for (int a = 0; a < d; ++a)
            x[a] = wrap_unit(x[a] + b[a] * dt + noise * gauss(rng));
    });
}

void line_sde_step(Exec ex, int d, const LineDrift& b, double confinement, double t, double dt,
                   std::uint64_t seed, std::uint64_t step, double* pos, std::size_t N)
{
    const double noise = std::sqrt(dt);
    for_cells(ex, N, [&](std::size_t p) {
        CounterRng rng(seed, p, step);
        std::normal_distribution<double> gauss;
        double* x = pos + p * d;
        double inc[2];
        for (int a = 0; a < d; ++a)
            inc[a] = (b(t, x, a) - confinement * x[a]) * dt;
        for (int a = 0; a < d; ++a)
            x[a] += inc[a] + noise * gauss(rng);
    });
}

} // namespace mfl::kernels
