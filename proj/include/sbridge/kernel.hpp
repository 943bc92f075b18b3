#pragma once

#include "sbridge/numgrid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbridge {

/// Feynman-Kac potential c(x, t) together with the diffusion constant nu.
struct Potential {
    std::function<double(double, double)> c;
    double nu = 1.0;
    std::string label = "custom";

    static Potential zero(double nu = 1.0);
    static Potential constant(double lambda, double nu = 1.0);
    /// c = Omega/2 of the free Gaussian packet, nu = 1.
    static Potential quantum_half_omega();
};

enum class KernelKind {
    Heat,
    Example1,
    QuantumK1,
    PinnedExample2,
    QuantumK2,
    MarkovFamily,
    NumericFK,
};

/// Two-time integral kernel k(y, s, x, t), s < t.
///
/// Analytic kinds are evaluated in closed form. NumericFK is the fundamental
/// solution of du/dt = nu u'' - c u on a fixed grid, computed on demand by
/// Crank-Nicolson; point queries snap to the grid columns and interpolate
/// linearly in between.
class Kernel {
public:
    static Kernel heat(double nu = 1.0);
    static Kernel example1();
    static Kernel quantum_k1();
    static Kernel pinned_example2();
    static Kernel quantum_k2();
    /// Markov family labelled by (y, s); its arguments are (x1, t1, x2, t2).
    static Kernel markov_family(double label_y, double label_s);
    /// `mesh_ratio` bounds nu*dt/h^2 for the time stepping.
    static Kernel numeric_fk(Potential potential, Grid1D grid, double mesh_ratio = 1.0);

    KernelKind kind() const noexcept { return kind_; }
    std::string_view tag() const noexcept;
    bool is_analytic() const noexcept { return kind_ != KernelKind::NumericFK; }
    /// Integrates to one in its forward argument.
    bool is_stochastic() const noexcept;
    double nu() const noexcept { return nu_; }
    double label_y() const noexcept { return label_y_; }
    double label_s() const noexcept { return label_s_; }

    /// Only for NumericFK.
    const Potential& potential() const;
    const Grid1D& fk_grid() const;
    double mesh_ratio() const noexcept { return mesh_ratio_; }

    /// Throws OrderingError if s >= t.
    double evaluate(double y, double s, double x, double t) const;
    double operator()(double y, double s, double x, double t) const { return evaluate(y, s, x, t); }

private:
    Kernel() = default;

    KernelKind kind_ = KernelKind::Heat;
    double nu_ = 1.0;
    double label_y_ = 0.0;
    double label_s_ = 0.0;
    double mesh_ratio_ = 1.0;
    std::shared_ptr<const Potential> potential_;
    std::optional<Grid1D> grid_;
};

/// Known kernel tags: heat, example1, quantum-k1, pinned-example2, quantum-k2,
/// markov-family, numeric-fk.
std::vector<std::string> kernel_tags();

/// Discretized kernel: entries(i, j) = k(y_i, s, x_j, t) on one grid.
struct KernelMatrix {
    Grid1D grid;
    double s;
    double t;
    Eigen::MatrixXd entries;
};

KernelMatrix kernel_matrix(const Kernel& kernel, const Grid1D& grid, double s, double t);

/// Smallest step count keeping nu*dt/h^2 <= mesh_ratio (at least 8).
std::size_t default_substeps(double nu, const Grid1D& grid, double s, double t, double mesh_ratio = 1.0);

/// Fundamental solution of du/dt = nu u'' - c u from the grid delta (1/h at
/// node j) at time s, advanced to t. Zero values are imposed just outside the
/// grid. Crank-Nicolson with two Rannacher start-up steps (four implicit
/// Euler half-steps) damping the delta's grid-scale modes.
KernelMatrix solve_feynman_kac(const Potential& potential, const Grid1D& grid, double s, double t,
                               std::size_t n_substeps);

/// u(x, t) = integral f(y) k(y, s, x, t) dy with s = f.time().
ScalarField propagate_forward(const Kernel& kernel, const ScalarField& f, double t);
/// v(y, s) = integral k(y, s, x, t) g(x) dx with t = g.time().
ScalarField propagate_backward(const Kernel& kernel, const ScalarField& g, double s);

/// Max over probe-window (y, x) of |integral k(y,s,z,tau) k(z,tau,x,t) dz - k(y,s,x,t)|.
double check_chapman_kolmogorov(const Kernel& kernel, double s, double tau, double t, const Grid1D& grid);

/// Default step list {1e-2, 5e-3, 2.5e-3} for the short-time limits.
std::vector<double> default_limit_steps();

/// Polynomial (Neville) extrapolation of samples (h_i, y_i) to h = 0.
double extrapolate_to_zero(std::span<const double> steps, std::span<const double> values);

struct MomentRow {
    double dt;
    double leak_rate;
    double first_moment_rate;
    double second_moment_rate;
};

struct MomentRates {
    double leak_rate = 0.0;
    double first_moment_rate = 0.0;
    double second_moment_rate = 0.0;
    std::vector<MomentRow> table;
    /// Empty unless a raw rate sequence was non-monotone in dt.
    std::string warning;
};

MomentRates short_time_moments(const Kernel& kernel, double y, double t,
                               std::span<const double> dts = {}, double epsilon = 1.0);

/// lim (1/dt)[mean of k(x, t, ., t+dt) - x], the kernel read as a pinned propagator.
double extract_forward_drift(const Kernel& kernel, double x, double t, std::span<const double> dts = {});

} // namespace sbridge
