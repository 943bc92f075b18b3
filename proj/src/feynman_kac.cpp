#include "feynman_kac_detail.hpp"

#include "sbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbridge {

namespace {

constexpr double kNegativityFloor = -1e-12;

// One implicit solve (I - alpha A(time)) X = X in place, A = nu D2 - c.
void implicit_solve(Eigen::MatrixXd& cols, const Potential& pot, const Grid1D& grid, double alpha,
                    double c_time) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double h2 = grid.spacing() * grid.spacing();
    const double off = -alpha * pot.nu / h2;
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        diag[static_cast<std::size_t>(i)] =
            1.0 + alpha * (2.0 * pot.nu / h2 + pot.c(grid.node(static_cast<std::size_t>(i)), c_time));

    // Thomas factorisation shared by all columns.
    std::vector<double> upper(static_cast<std::size_t>(n));
    std::vector<double> inv_pivot(static_cast<std::size_t>(n));
    double pivot = diag[0];
    inv_pivot[0] = 1.0 / pivot;
    upper[0] = off * inv_pivot[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        pivot = diag[k] - off * upper[k - 1];
        inv_pivot[k] = 1.0 / pivot;
        upper[k] = off * inv_pivot[k];
    }

    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
        double* x = cols.col(j).data();
        x[0] *= inv_pivot[0];
        for (Eigen::Index i = 1; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            x[i] = (x[i] - off * x[i - 1]) * inv_pivot[k];
        }
        for (Eigen::Index i = n - 2; i >= 0; --i)
            x[i] -= upper[static_cast<std::size_t>(i)] * x[i + 1];
    }
}

// X <- (I + beta A(time)) X with zero ghost values.
void explicit_apply(Eigen::MatrixXd& cols, const Potential& pot, const Grid1D& grid, double beta,
                    double c_time) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double h2 = grid.spacing() * grid.spacing();
    std::vector<double> c(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        c[static_cast<std::size_t>(i)] = pot.c(grid.node(static_cast<std::size_t>(i)), c_time);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
        double* x = cols.col(j).data();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double left = i > 0 ? x[i - 1] : 0.0;
            const double right = i + 1 < n ? x[i + 1] : 0.0;
            const auto k = static_cast<std::size_t>(i);
            out[k] = x[i] + beta * (pot.nu * (right - 2.0 * x[i] + left) / h2 - c[k] * x[i]);
        }
        std::copy(out.begin(), out.end(), x);
    }
}

} // namespace

namespace detail {

void advance_parabolic(Eigen::MatrixXd& cols, const Potential& pot, const Grid1D& grid, double tau0,
                       double tau1, std::size_t n_steps, const std::function<double(double)>& clock) {
    if (!(tau1 > tau0))
        throw OrderingError("advance_parabolic: end time must exceed start time");
    if (n_steps < 2)
        throw NumericDomainError("advance_parabolic: need at least two steps");
    const double dt = (tau1 - tau0) / static_cast<double>(n_steps);
    double tau = tau0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        if (step < 2) {
            implicit_solve(cols, pot, grid, 0.5 * dt, clock(tau + 0.5 * dt));
            implicit_solve(cols, pot, grid, 0.5 * dt, clock(tau + dt));
        } else {
            explicit_apply(cols, pot, grid, 0.5 * dt, clock(tau));
            implicit_solve(cols, pot, grid, 0.5 * dt, clock(tau + dt));
        }
        tau = tau0 + static_cast<double>(step + 1) * dt;
    }
}

void check_positivity(Eigen::MatrixXd& values, const char* context) {
    const double lowest = values.minCoeff();
    if (lowest < kNegativityFloor)
        throw PositivityError(std::string(context) + ": negative kernel entry " + std::to_string(lowest) +
                              " (grid too coarse or potential inadmissible)");
    values = values.cwiseMax(0.0);
}

Eigen::VectorXd fk_column(const Potential& pot, const Grid1D& grid, std::size_t node, double s, double t,
                          std::size_t n_steps) {
    Eigen::MatrixXd col = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()), 1);
    col(static_cast<Eigen::Index>(node), 0) = 1.0 / grid.spacing();
    advance_parabolic(col, pot, grid, s, t, n_steps, [](double tau) { return tau; });
    check_positivity(col, "numeric Feynman-Kac kernel");
    return col.col(0);
}

} // namespace detail

std::size_t default_substeps(double nu, const Grid1D& grid, double s, double t, double mesh_ratio) {
    if (!(t > s))
        throw OrderingError("default_substeps: require s < t");
    const double h2 = grid.spacing() * grid.spacing();
    const auto steps = static_cast<std::size_t>(std::ceil(nu * (t - s) / (mesh_ratio * h2)));
    return std::max<std::size_t>(steps, 8);
}

KernelMatrix solve_feynman_kac(const Potential& potential, const Grid1D& grid, double s, double t,
                               std::size_t n_substeps) {
    if (!(t > s))
        throw OrderingError("solve_feynman_kac: require s < t");
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd cols = Eigen::MatrixXd::Identity(n, n) / grid.spacing();
    detail::advance_parabolic(cols, potential, grid, s, t, n_substeps, [](double tau) { return tau; });
    detail::check_positivity(cols, "solve_feynman_kac");
    // Column j started at y_j, so row-major source indexing is the transpose.
    return KernelMatrix{grid, s, t, cols.transpose()};
}

} // namespace sbridge
