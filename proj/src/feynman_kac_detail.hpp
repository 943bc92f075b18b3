#pragma once

#include "sbridge/kernel.hpp"

#include <Eigen/Dense>

#include <functional>

namespace sbridge::detail {

/// Advance each column over [tau0, tau1] under du/dtau = nu u'' - c(x, clock(tau)) u.
void advance_parabolic(Eigen::MatrixXd& cols, const Potential& pot, const Grid1D& grid, double tau0,
                       double tau1, std::size_t n_steps, const std::function<double(double)>& clock);

/// Throws PositivityError below the floor, then clamps roundoff negatives to zero.
void check_positivity(Eigen::MatrixXd& values, const char* context);

/// k(y_node, s, ., t) on the grid.
Eigen::VectorXd fk_column(const Potential& pot, const Grid1D& grid, std::size_t node, double s, double t,
                          std::size_t n_steps);

} // namespace sbridge::detail
