#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfl {

using Point = std::array<double, 2>;

// Uniform periodic grid on the unit torus, sample points x_i = i*h.
class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double h() const { return 1.0 / n_; }
    std::size_t size() const { return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_; }
    double cell_volume() const { return dim_ == 1 ? h() : h() * h(); }
    double diameter() const;

    Point point(std::size_t idx) const;
    bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int dim_ = 1;
    int n_ = 8;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const TorusGrid& g, double fill = 0.0);
    GridFunction(const TorusGrid& g, std::vector<double> v);

    template <class F>
    static GridFunction tabulate(const TorusGrid& g, F&& f)
    {
        GridFunction out(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            out.v_[i] = f(g.point(i));
        return out;
    }

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    const double* data() const { return v_.data(); }
    double* data() { return v_.data(); }

    double mean() const;
    double integral() const;
    double max_abs() const;
    // subtract the Lebesgue average
    GridFunction& center();
    GridFunction centered() const;
    bool is_mean_zero(double tol = 1e-12) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    GridFunction& add_scaled(double s, const GridFunction& o);

private:
    TorusGrid grid_;
    std::vector<double> v_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

// Nonnegative density with unit mass under cell quadrature.
class GridDensity {
public:
    GridDensity() = default;

    static GridDensity uniform(const TorusGrid& g);
    // rescales to unit mass; throws on negative entries or zero mass
    static GridDensity normalize(const GridFunction& f);
    static GridDensity normalize(const TorusGrid& g, std::vector<double> v);
    // takes values as is; mass must already be 1 within tol
    static GridDensity adopt(const TorusGrid& g, std::vector<double> v, double tol = 1e-10);

    template <class F>
    static GridDensity tabulate(const TorusGrid& g, F&& f)
    {
        return normalize(GridFunction::tabulate(g, std::forward<F>(f)));
    }

    const TorusGrid& grid() const { return f_.grid(); }
    std::size_t size() const { return f_.size(); }
    double operator[](std::size_t i) const { return f_[i]; }
    const std::vector<double>& values() const { return f_.values(); }
    const double* data() const { return f_.data(); }
    const GridFunction& function() const { return f_; }

    double mass() const { return f_.integral(); }
    double min() const;
    double max() const;

private:
    explicit GridDensity(GridFunction f) : f_(std::move(f)) {}
    GridFunction f_;
};

inline constexpr double kPositivityFloor = 1e-300;
inline constexpr double kFisherFloor = 1e-12;

double entropy(const GridDensity& mu);
double fisher_information(const GridDensity& mu);

// centered periodic difference along axis
GridFunction partial(const GridFunction& f, int axis);
GridFunction log_density(const GridDensity& mu);

// q(t, z) over displacements z_i = i*h
GridFunction wrapped_heat_kernel(double t, const TorusGrid& g);
int heat_kernel_images(double t);
double heat_kernel_1d(double t, double z, int K);

GridDensity wrapped_gaussian(const TorusGrid& g, const Point& center, double t);

GridFunction convolve_periodic(const GridFunction& f, const GridFunction& g);
// O(n^2) reference sum
GridFunction convolve_direct(const GridFunction& f, const GridFunction& g);

double w1_circle(const GridDensity& mu, const GridDensity& nu);

void write_grid(std::ostream& os, const GridFunction& f);
void write_grid(const std::string& path, const GridFunction& f);
GridFunction read_grid(std::istream& is);
GridFunction read_grid(const std::string& path);
void write_csv_1d(std::ostream& os, const GridFunction& f, const std::string& column = "value");

} // namespace mfl
