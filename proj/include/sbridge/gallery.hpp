#pragma once

#include "sbridge/bridge.hpp"
#include "sbridge/closed_forms.hpp"
#include "sbridge/numgrid.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sbridge::gallery {

/// One named check: pass iff lower <= value <= upper (bounds may be infinite).
struct CheckResult {
    std::string name;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;

    static CheckResult at_most(std::string name, double value, double tolerance);
    static CheckResult above(std::string name, double value, double threshold);
    static CheckResult within(std::string name, double value, double lower, double upper);
};

struct CheckReport {
    std::string scenario;
    std::vector<CheckResult> checks;

    bool passed() const noexcept;
    void add(CheckResult check) { checks.push_back(std::move(check)); }
    /// Throws ValidationError for an unknown name.
    const CheckResult& find(std::string_view name) const;
};

/// Default terminal time of every scenario.
inline constexpr double kTerminalTime = 1.0;

/// Grid on which the boundary system recovers the packet factors to 1e-6.
Grid1D factor_grid();

/// Bridge solution assembled from the closed-form fields (u = theta*, v = theta).
BridgeSolution packet_solution(const Grid1D& grid, const TimeGrid& lattice);

using ResidualFn = std::function<double(const Grid1D&, const TimeGrid&)>;

/// residual(grid, lattice) / residual(grid and lattice halved).
double refinement_ratio(const ResidualFn& residual, const Grid1D& grid, const TimeGrid& lattice);

struct ParabolicResiduals {
    double theta;
    double theta_star;
};

/// Tail-masked residuals of d_t theta = -Laplace theta + (Omega/2) theta and
/// d_t theta* = Laplace theta* - (Omega/2) theta*.
ParabolicResiduals verify_parabolic_system(const Grid1D& grid, const TimeGrid& lattice);

/// max |theta theta* - rho| over the grid and lattice.
double product_identity_error(const Grid1D& grid, const TimeGrid& lattice);

/// max tail-masked |2 Laplace sqrt(rho) / sqrt(rho) - Omega/2| on the lattice.
double quantum_potential_error(const Grid1D& grid, const TimeGrid& lattice);

/// Max discrepancy between closed-form fields and finite differences of psi
/// (rho = |psi|^2, b = 2 grad(R + S), b* = 2 grad(S - R), v = 2 grad S) at sample points.
double psi_consistency_error();

/// Relative tail-masked errors of the boundary factors solved with `kernel`
/// against theta*(., 0) and theta(., T) in the matching gauge.
struct FactorRecovery {
    double u0_error;
    double vT_error;
    BridgeFactors factors;
};
FactorRecovery recover_packet_factors(const Kernel& kernel, const Grid1D& grid);

/// Suites on the given grid and lattice; refinement-order checks use fixed coarse base lattices.
CheckReport quantum_free_suite(const Grid1D& grid, const TimeGrid& lattice);
CheckReport example1_suite(const Grid1D& grid, const TimeGrid& lattice);
CheckReport example2_suite(const Grid1D& grid, const TimeGrid& lattice);

/// quantum-free, example1, example2.
std::vector<std::string> scenario_names();

/// Runs a named suite on the standard grid and the default lattice on [0, 1].
/// Throws ValidationError for an unknown name.
CheckReport run_scenario(std::string_view name);
CheckReport run_scenario(std::string_view name, const Grid1D& grid, const TimeGrid& lattice);

} // namespace sbridge::gallery
