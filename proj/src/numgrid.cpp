#include "sbridge/numgrid.hpp"

#include "sbridge/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace sbridge {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), h_(0.0) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
        throw NumericDomainError("Grid1D: require finite x_min < x_max");
    if (n_points < 3)
        throw NumericDomainError("Grid1D: need at least 3 nodes");
    h_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

Grid1D Grid1D::standard() { return {-10.0, 10.0, 513}; }

std::vector<double> Grid1D::nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i)
        xs[i] = node(i);
    return xs;
}

Grid1D Grid1D::refined(std::size_t factor) const {
    if (factor == 0)
        throw NumericDomainError("Grid1D::refined: factor must be positive");
    return {x_min_, x_max_, (n_ - 1) * factor + 1};
}

bool Grid1D::in_probe_window(std::size_t i) const noexcept {
    const double centre = 0.5 * (x_min_ + x_max_);
    return std::abs(node(i) - centre) <= 0.25 * (x_max_ - x_min_) + 1e-12 * h_;
}

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
    if (!(t_start >= 0.0) || !(t_start < t_end) || !std::isfinite(t_end))
        throw NumericDomainError("TimeGrid: require 0 <= t_start < t_end");
    if (n_steps == 0)
        throw NumericDomainError("TimeGrid: need at least one step");
}

double TimeGrid::time(std::size_t k) const noexcept {
    if (k == n_steps_)
        return t_end_;
    return t_start_ + static_cast<double>(k) * dt();
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> ts(n_slices());
    for (std::size_t k = 0; k < ts.size(); ++k)
        ts[k] = time(k);
    return ts;
}

ScalarField::ScalarField(Grid1D grid, std::vector<double> values, double time_label)
    : grid_(grid), values_(std::move(values)), time_(time_label) {
    if (values_.size() != grid_.size())
        throw NumericDomainError("ScalarField: value count " + std::to_string(values_.size()) +
                                 " does not match grid size " + std::to_string(grid_.size()));
}

ScalarField::ScalarField(Grid1D grid, double time_label)
    : grid_(grid), values_(grid.size(), 0.0), time_(time_label) {}

void ScalarField::require_finite(const char* context) const {
    for (double v : values_)
        if (!std::isfinite(v))
            throw NumericDomainError(std::string(context) + ": non-finite field entry");
}

ScalarField sample(const Grid1D& grid, const std::function<double(double)>& f, double time_label) {
    ScalarField out(grid, time_label);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = f(grid.node(i));
    return out;
}

ScalarField sample(const Grid1D& grid, const std::function<double(double, double)>& f, double t) {
    ScalarField out(grid, t);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = f(grid.node(i), t);
    return out;
}

FieldSeries sample_series(const Grid1D& grid, const TimeGrid& times,
                          const std::function<double(double, double)>& f) {
    FieldSeries series;
    series.reserve(times.n_slices());
    for (std::size_t k = 0; k < times.n_slices(); ++k)
        series.push_back(sample(grid, f, times.time(k)));
    return series;
}

std::vector<double> trapezoid_weights(const Grid1D& grid) {
    std::vector<double> w(grid.size(), grid.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double integrate(const ScalarField& f) {
    f.require_finite("integrate");
    const auto v = f.values();
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        interior += v[i];
    return f.grid().spacing() * (interior + 0.5 * (v.front() + v.back()));
}

ScalarField gradient(const ScalarField& f) {
    f.require_finite("gradient");
    const std::size_t n = f.size();
    const double h = f.grid().spacing();
    ScalarField g(f.grid(), f.time());
    for (std::size_t i = 1; i + 1 < n; ++i)
        g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return g;
}

ScalarField laplacian(const ScalarField& f) {
    f.require_finite("laplacian");
    const std::size_t n = f.size();
    const double h2 = f.grid().spacing() * f.grid().spacing();
    ScalarField l(f.grid(), f.time());
    for (std::size_t i = 1; i + 1 < n; ++i)
        l[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    l[0] = l[1];
    l[n - 1] = l[n - 2];
    return l;
}

ScalarField normalize(const ScalarField& f) {
    const double mass = integrate(f);
    if (!(mass > 0.0))
        throw NormalizationError("normalize: field has non-positive mass " + std::to_string(mass));
    ScalarField out = f;
    for (auto& v : out.values())
        v /= mass;
    return out;
}

ScalarField cumulative_trapezoid(const ScalarField& f) {
    f.require_finite("cumulative_trapezoid");
    const double h = f.grid().spacing();
    ScalarField c(f.grid(), f.time());
    for (std::size_t i = 1; i < f.size(); ++i)
        c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return c;
}

ScalarField integrate_gradient(const ScalarField& g, std::size_t anchor) {
    g.require_finite("integrate_gradient");
    const std::size_t n = g.size();
    if (anchor >= n)
        throw NumericDomainError("integrate_gradient: anchor outside grid");
    const double h = g.grid().spacing();

    // Chains of the anchor's parity and of the opposite parity; the latter
    // starts from 0 at a neighbour of the anchor and is shifted afterwards.
    std::vector<double> l(n, 0.0);
    std::vector<bool> same_parity(n);
    for (std::size_t i = 0; i < n; ++i)
        same_parity[i] = ((i % 2) == (anchor % 2));

    auto walk = [&](std::size_t start) {
        for (std::size_t i = start; i + 2 < n; i += 2)
            l[i + 2] = l[i] + 2.0 * h * g[i + 1];
        for (std::size_t i = start; i >= 2; i -= 2)
            l[i - 2] = l[i] - 2.0 * h * g[i - 1];
    };
    walk(anchor);
    const std::size_t other = anchor + 1 < n ? anchor + 1 : anchor - 1;
    l[other] = 0.0;
    walk(other);

    // Choose the offset delta of the opposite chain from the two one-sided
    // boundary rows in the least-squares sense.
    auto row = [&](std::size_t a, std::size_t b, std::size_t c, double sign, double target,
                   double& alpha, double& beta) {
        const std::array<std::size_t, 3> idx{a, b, c};
        const std::array<double, 3> coeff{-3.0, 4.0, -1.0};
        alpha = 0.0;
        beta = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double w = sign * coeff[k] / (2.0 * h);
            beta += w * l[idx[k]];
            if (!same_parity[idx[k]])
                alpha += w;
        }
        beta -= target;
    };
    double a0 = 0.0, b0 = 0.0, a1 = 0.0, b1 = 0.0;
    row(0, 1, 2, 1.0, g[0], a0, b0);
    row(n - 1, n - 2, n - 3, -1.0, g[n - 1], a1, b1);
    const double delta = -(a0 * b0 + a1 * b1) / (a0 * a0 + a1 * a1);
    for (std::size_t i = 0; i < n; ++i)
        if (!same_parity[i])
            l[i] += delta;

    ScalarField out(g.grid(), g.time());
    for (std::size_t i = 0; i < n; ++i)
        out[i] = l[i];
    return out;
}

namespace {

// Locate the cell containing x; returns i with node(i) <= x <= node(i+1).
std::size_t cell_of(const Grid1D& grid, double x) {
    const double pos = (x - grid.x_min()) / grid.spacing();
    if (pos <= 0.0)
        return 0;
    const auto i = static_cast<std::size_t>(pos);
    return std::min(i, grid.size() - 2);
}

} // namespace

double interpolate_linear(const ScalarField& f, double x) {
    const Grid1D& grid = f.grid();
    if (x <= grid.x_min())
        return f[0];
    if (x >= grid.x_max())
        return f[grid.size() - 1];
    const std::size_t i = cell_of(grid, x);
    const double frac = (x - grid.node(i)) / grid.spacing();
    return (1.0 - frac) * f[i] + frac * f[i + 1];
}

namespace {

template <typename Transform>
double lagrange4(const ScalarField& f, double x, Transform transform) {
    const Grid1D& grid = f.grid();
    const std::size_t n = grid.size();
    if (n < 4)
        throw NumericDomainError("cubic interpolation needs at least 4 nodes");
    const std::size_t i = cell_of(grid, x);
    std::size_t first = i == 0 ? 0 : i - 1;
    first = std::min(first, n - 4);
    const double s = (x - grid.node(first)) / grid.spacing();
    double acc = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
        double basis = 1.0;
        for (std::size_t b = 0; b < 4; ++b)
            if (b != a)
                basis *= (s - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
        acc += basis * transform(f[first + a]);
    }
    return acc;
}

} // namespace

double interpolate_cubic(const ScalarField& f, double x) {
    return lagrange4(f, x, [](double v) { return v; });
}

double interpolate_log_cubic(const ScalarField& f, double x) {
    return std::exp(lagrange4(f, x, [](double v) {
        if (!(v > 0.0))
            throw NumericDomainError("interpolate_log_cubic: field must be strictly positive");
        return std::log(v);
    }));
}

ScalarField pointwise(const ScalarField& a, const ScalarField& b,
                      const std::function<double(double, double)>& op) {
    if (!(a.grid() == b.grid()))
        throw NumericDomainError("pointwise: grid mismatch");
    ScalarField out(a.grid(), a.time());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = op(a[i], b[i]);
    return out;
}

ScalarField log_field(const ScalarField& f, double floor) {
    ScalarField out(f.grid(), f.time());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = std::log(std::max(f[i], floor));
    return out;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    return integrate(pointwise(a, b, [](double x, double y) { return std::abs(x - y); }));
}

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid()))
        throw NumericDomainError("max_abs_difference: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double require_uniform_series(const FieldSeries& series, std::size_t min_slices) {
    if (series.size() < min_slices)
        throw NumericDomainError("field series needs at least " + std::to_string(min_slices) + " slices");
    const double dt = series[1].time() - series[0].time();
    if (!(dt > 0.0))
        throw NumericDomainError("field series times must increase");
    for (std::size_t k = 1; k < series.size(); ++k) {
        if (!(series[k].grid() == series[0].grid()))
            throw NumericDomainError("field series slices must share one grid");
        const double step = series[k].time() - series[k - 1].time();
        if (std::abs(step - dt) > 1e-6 * dt)
            throw NumericDomainError("field series times must be uniform");
    }
    return dt;
}

ScalarField time_derivative(const FieldSeries& series, std::size_t k, int order) {
    const std::size_t m = series.size();
    if (order != 2 && order != 4)
        throw NumericDomainError("time_derivative: order must be 2 or 4");
    const double dt = require_uniform_series(series, order == 2 ? 3 : 5);
    if (k >= m)
        throw NumericDomainError("time_derivative: slice index out of range");

    // Weights over a window of consecutive slices starting at `first`.
    std::size_t first = 0;
    std::vector<double> w;
    if (order == 2) {
        if (k == 0) {
            first = 0;
            w = {-1.5, 2.0, -0.5};
        } else if (k == m - 1) {
            first = m - 3;
            w = {0.5, -2.0, 1.5};
        } else {
            first = k - 1;
            w = {-0.5, 0.0, 0.5};
        }
    } else {
        // Five-point fourth-order stencils, positioned by distance to the ends.
        static const std::array<std::array<double, 5>, 5> table{{
            {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -0.25},
            {-0.25, -5.0 / 6, 1.5, -0.5, 1.0 / 12},
            {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
            {-1.0 / 12, 0.5, -1.5, 5.0 / 6, 0.25},
            {0.25, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
        }};
        std::size_t pos = 2;
        if (k < 2)
            pos = k;
        else if (k + 2 >= m)
            pos = 4 - (m - 1 - k);
        first = k - pos;
        w.assign(table[pos].begin(), table[pos].end());
    }

    ScalarField out(series[k].grid(), series[k].time());
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (w[a] == 0.0)
            continue;
        const auto& slice = series[first + a];
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += w[a] * slice[i] / dt;
    }
    return out;
}

} // namespace sbridge
