#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sbridge {

/// Uniform 1-D spatial grid with nodes x_min + i*h, i = 0..n-1.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_points);

    /// [-10, 10] with 513 nodes.
    static Grid1D standard();

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double node(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * h_; }
    std::vector<double> nodes() const;
    std::size_t center_index() const noexcept { return n_ / 2; }

    /// Same extent, spacing divided by `factor` (n-1 intervals become factor*(n-1)).
    Grid1D refined(std::size_t factor) const;

    /// Nodes whose distance from the grid centre is at most a quarter of the extent.
    bool in_probe_window(std::size_t i) const noexcept;

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_;
};

/// Uniform time lattice t_start = t_0 < ... < t_{n_steps} = t_end.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_steps);

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_slices() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return (t_end_ - t_start_) / static_cast<double>(n_steps_); }
    double time(std::size_t k) const noexcept;
    std::vector<double> times() const;
    TimeGrid refined(std::size_t factor) const { return {t_start_, t_end_, n_steps_ * factor}; }

private:
    double t_start_;
    double t_end_;
    std::size_t n_steps_;
};

/// Real function sampled on a grid at a time label.
class ScalarField {
public:
    ScalarField(Grid1D grid, std::vector<double> values, double time_label = 0.0);
    /// Zero field.
    explicit ScalarField(Grid1D grid, double time_label = 0.0);

    const Grid1D& grid() const noexcept { return grid_; }
    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    /// Throws NumericDomainError if any entry is NaN or infinite.
    void require_finite(const char* context) const;

private:
    Grid1D grid_;
    std::vector<double> values_;
    double time_;
};

/// Fields on a common grid at increasing time labels.
using FieldSeries = std::vector<ScalarField>;

ScalarField sample(const Grid1D& grid, const std::function<double(double)>& f, double time_label = 0.0);
ScalarField sample(const Grid1D& grid, const std::function<double(double, double)>& f, double t);
FieldSeries sample_series(const Grid1D& grid, const TimeGrid& times,
                          const std::function<double(double, double)>& f);

/// Composite trapezoid weights h*(1/2, 1, ..., 1, 1/2).
std::vector<double> trapezoid_weights(const Grid1D& grid);

double integrate(const ScalarField& f);
ScalarField gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField normalize(const ScalarField& f);

/// Running trapezoid integral from node 0.
ScalarField cumulative_trapezoid(const ScalarField& f);

/// Exact inverse of `gradient` on its range: returns L with L[anchor] = 0 and
/// central differences of L equal to g at every interior node. The parity
/// offset between even and odd nodes is fixed by the boundary stencils.
ScalarField integrate_gradient(const ScalarField& g, std::size_t anchor);

/// Linear interpolation; clamps outside the grid.
double interpolate_linear(const ScalarField& f, double x);
/// Four-point Lagrange interpolation of f.
double interpolate_cubic(const ScalarField& f, double x);
/// Four-point Lagrange interpolation of ln f (exact for Gaussians). f must be > 0.
double interpolate_log_cubic(const ScalarField& f, double x);

ScalarField pointwise(const ScalarField& a, const ScalarField& b,
                      const std::function<double(double, double)>& op);
ScalarField log_field(const ScalarField& f, double floor = 1e-300);

double l1_distance(const ScalarField& a, const ScalarField& b);
double max_abs_difference(const ScalarField& a, const ScalarField& b);

/// Time derivative of a uniform series at slice k. order 2: central interior,
/// three-point one-sided ends. order 4: five-point stencils throughout.
ScalarField time_derivative(const FieldSeries& series, std::size_t k, int order = 2);

/// Throws NumericDomainError unless all slices share one grid and the labels form a uniform lattice.
double require_uniform_series(const FieldSeries& series, std::size_t min_slices);

} // namespace sbridge
