#include "mfl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfl/error.hpp"
#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

using kernels::Exec;

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n)
{
    if (dim != 1 && dim != 2)
        throw Error(Errc::DimensionUnsupported, "torus dimension must be 1 or 2", dim);
    if (n < 8 || (n & (n - 1)) != 0)
        throw Error(Errc::InvalidGrid, "points per axis must be a power of two >= 8", n);
}

double TorusGrid::diameter() const { return std::sqrt(double(dim_)) / 2.0; }

Point TorusGrid::point(std::size_t idx) const
{
    if (dim_ == 1)
        return {double(idx) * h(), 0.0};
    return {double(idx / n_) * h(), double(idx % n_) * h()};
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where)
{
    if (a != b)
        throw Error(Errc::GridMismatch, where);
}

GridFunction::GridFunction(const TorusGrid& g, double fill) : grid_(g), v_(g.size(), fill) {}

GridFunction::GridFunction(const TorusGrid& g, std::vector<double> v) : grid_(g), v_(std::move(v))
{
    if (v_.size() != g.size())
        throw Error(Errc::GridMismatch, "value count does not match grid");
    for (double x : v_)
        if (!std::isfinite(x))
            throw Error(Errc::AssertionFailure, "non-finite grid value");
}

double GridFunction::mean() const { return kernels::sum(Exec::parallel, v_.data(), v_.size()) / double(v_.size()); }

double GridFunction::integral() const
{
    return kernels::sum(Exec::parallel, v_.data(), v_.size()) * grid_.cell_volume();
}

double GridFunction::max_abs() const
{
    double m = 0.0;
    for (double x : v_)
        m = std::max(m, std::abs(x));
    return m;
}

GridFunction& GridFunction::center()
{
    double m = mean();
    for (double& x : v_)
        x -= m;
    return *this;
}

GridFunction GridFunction::centered() const
{
    GridFunction c(*this);
    return c.center();
}

bool GridFunction::is_mean_zero(double tol) const { return std::abs(mean()) <= tol; }

GridFunction& GridFunction::operator+=(const GridFunction& o)
{
    require_same_grid(grid_, o.grid_, "GridFunction +=");
    for (std::size_t i = 0; i < v_.size(); ++i)
        v_[i] += o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o)
{
    require_same_grid(grid_, o.grid_, "GridFunction -=");
    for (std::size_t i = 0; i < v_.size(); ++i)
        v_[i] -= o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s)
{
    for (double& x : v_)
        x *= s;
    return *this;
}

GridFunction& GridFunction::add_scaled(double s, const GridFunction& o)
{
    require_same_grid(grid_, o.grid_, "GridFunction add_scaled");
    for (std::size_t i = 0; i < v_.size(); ++i)
        v_[i] += s * o.v_[i];
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

GridDensity GridDensity::uniform(const TorusGrid& g) { return GridDensity(GridFunction(g, 1.0)); }

GridDensity GridDensity::normalize(const GridFunction& f)
{
    for (double x : f.values())
        if (!(x >= 0.0))
            throw Error(Errc::NegativeDensity, "density values must be nonnegative", x);
    double m = f.integral();
    if (!(m > 0.0) || !std::isfinite(m))
        throw Error(Errc::DegenerateDensity, "density has no mass", m);
    GridFunction out(f);
    out *= 1.0 / m;
    return GridDensity(std::move(out));
}

GridDensity GridDensity::normalize(const TorusGrid& g, std::vector<double> v)
{
    return normalize(GridFunction(g, std::move(v)));
}

GridDensity GridDensity::adopt(const TorusGrid& g, std::vector<double> v, double tol)
{
    GridFunction f(g, std::move(v));
    for (double x : f.values())
        if (!(x >= 0.0))
            throw Error(Errc::NegativeDensity, "density values must be nonnegative", x);
    double m = f.integral();
    if (std::abs(m - 1.0) > tol)
        throw Error(Errc::AssertionFailure, "adopted density does not have unit mass", m);
    return GridDensity(std::move(f));
}

double GridDensity::min() const { return *std::min_element(values().begin(), values().end()); }
double GridDensity::max() const { return *std::max_element(values().begin(), values().end()); }

double entropy(const GridDensity& mu)
{
    std::vector<double> t(mu.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double m = mu[i];
        t[i] = m > 0.0 ? m * std::log(std::max(m, kPositivityFloor)) : 0.0;
    }
    return kernels::sum(Exec::parallel, t.data(), t.size()) * mu.grid().cell_volume();
}

GridFunction partial(const GridFunction& f, int axis)
{
    const TorusGrid& g = f.grid();
    const int n = g.n();
    const double inv = 0.5 / g.h();
    GridFunction out(g);
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i)
            out[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) * inv;
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::size_t c = std::size_t(i) * n + j;
            if (axis == 0)
                out[c] = (f[std::size_t((i + 1) % n) * n + j] - f[std::size_t((i + n - 1) % n) * n + j]) * inv;
            else
                out[c] = (f[std::size_t(i) * n + (j + 1) % n] - f[std::size_t(i) * n + (j + n - 1) % n]) * inv;
        }
    return out;
}

GridFunction log_density(const GridDensity& mu)
{
    GridFunction out(mu.grid());
    for (std::size_t i = 0; i < mu.size(); ++i)
        out[i] = std::log(std::max(mu[i], kPositivityFloor));
    return out;
}

double fisher_information(const GridDensity& mu)
{
    if (mu.min() < kFisherFloor)
        throw Error(Errc::DegenerateDensity, "Fisher information needs a positive density", mu.min());
    GridFunction lg = log_density(mu);
    std::vector<double> t(mu.size(), 0.0);
    for (int a = 0; a < mu.grid().dim(); ++a) {
        GridFunction d = partial(lg, a);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] += d[i] * d[i] * mu[i];
    }
    return kernels::sum(Exec::parallel, t.data(), t.size()) * mu.grid().cell_volume();
}

int heat_kernel_images(double t)
{
    if (!(t > 0.0))
        throw Error(Errc::InvalidTime, "heat kernel time must be positive", t);
    // images beyond distance K-1 carry less than 1e-14 of the mass
    const double s = std::sqrt(2.0 * t);
    int K = 1;
    while (std::erfc((K - 1) / s) >= 1e-14)
        ++K;
    return K;
}

double heat_kernel_1d(double t, double z, int K)
{
    const double c = 1.0 / std::sqrt(2.0 * M_PI * t);
    double s = 0.0;
    for (int k = -K; k <= K; ++k) {
        double y = z + k;
        s += std::exp(-y * y / (2.0 * t));
    }
    return c * s;
}

GridFunction wrapped_heat_kernel(double t, const TorusGrid& g)
{
    const int K = heat_kernel_images(t);
    const int n = g.n();
    std::vector<double> q1(n);
    for (int i = 0; i < n; ++i)
        q1[i] = heat_kernel_1d(t, i * g.h(), K);
    GridFunction out(g);
    if (g.dim() == 1) {
        out.values() = q1;
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[std::size_t(i) * n + j] = q1[i] * q1[j];
    return out;
}

GridDensity wrapped_gaussian(const TorusGrid& g, const Point& center, double t)
{
    const int K = heat_kernel_images(t);
    return GridDensity::tabulate(g, [&](const Point& x) {
        double v = heat_kernel_1d(t, x[0] - center[0], K);
        if (g.dim() == 2)
            v *= heat_kernel_1d(t, x[1] - center[1], K);
        return v;
    });
}

GridFunction convolve_periodic(const GridFunction& f, const GridFunction& g)
{
    require_same_grid(f.grid(), g.grid(), "convolve_periodic");
    return Convolver(f).apply(g);
}

GridFunction convolve_direct(const GridFunction& f, const GridFunction& g)
{
    require_same_grid(f.grid(), g.grid(), "convolve_direct");
    GridFunction out(f.grid());
    kernels::direct_convolution(Exec::serial, f.grid(), g.data(), f.data(), out.data());
    return out;
}

double w1_circle(const GridDensity& mu, const GridDensity& nu)
{
    require_same_grid(mu.grid(), nu.grid(), "w1_circle");
    if (mu.grid().dim() != 1)
        throw Error(Errc::DimensionUnsupported, "w1_circle is defined on the circle only", mu.grid().dim());
    const std::size_t n = mu.size();
    const double h = mu.grid().h();
    std::vector<double> F(n);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c += (mu[i] - nu[i]) * h;
        F[i] = c;
    }
    // the optimal shift is a median of the cumulative difference
    std::vector<double> s(F);
    std::nth_element(s.begin(), s.begin() + n / 2, s.end());
    double med = s[n / 2];
    double w = 0.0;
    for (double x : F)
        w += std::abs(x - med);
    return w * h;
}

void write_grid(std::ostream& os, const GridFunction& f)
{
    os << "torus d=" << f.grid().dim() << " n=" << f.grid().n() << '\n';
    char buf[40];
    for (double x : f.values()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        os << buf;
    }
}

void write_grid(const std::string& path, const GridFunction& f)
{
    std::ofstream os(path);
    if (!os)
        throw Error(Errc::IoError, "cannot write " + path);
    write_grid(os, f);
}

GridFunction read_grid(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw Error(Errc::IoError, "missing grid header");
    int d = 0, n = 0;
    if (std::sscanf(line.c_str(), "torus d=%d n=%d", &d, &n) != 2)
        throw Error(Errc::IoError, "bad grid header: " + line);
    TorusGrid g(d, n);
    std::vector<double> v(g.size());
    for (auto& x : v) {
        if (!std::getline(is, line))
            throw Error(Errc::IoError, "truncated grid block");
        x = std::strtod(line.c_str(), nullptr);
    }
    return GridFunction(g, std::move(v));
}

GridFunction read_grid(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(Errc::IoError, "cannot read " + path);
    return read_grid(is);
}

void write_csv_1d(std::ostream& os, const GridFunction& f, const std::string& column)
{
    if (f.grid().dim() != 1)
        throw Error(Errc::DimensionUnsupported, "CSV export is for 1D grids", f.grid().dim());
    os << "x," << column << '\n';
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid().point(i)[0], f[i]);
        os << buf;
    }
}

} // namespace mfl
