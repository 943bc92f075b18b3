#pragma once

#include "sbridge/kernel.hpp"
#include "sbridge/numgrid.hpp"

#include <cstddef>
#include <vector>

namespace sbridge {

/// Boundary densities at times 0 and T on one grid.
struct BoundaryData {
    ScalarField rho0;
    ScalarField rhoT;
    double T;

    /// Labels the fields with times 0 and T and validates. Throws ValidationError
    /// unless both fields are strictly positive and integrate to 1 within 1e-8, then
    /// rescales each to unit trapezoid mass.
    BoundaryData(ScalarField rho0, ScalarField rhoT, double T);
};

/// Factor pair (u0, vT), gauge fixed by integral u0 = 1.
struct BridgeFactors {
    ScalarField u0;
    ScalarField vT;
    /// Mass of u0 before the gauge was fixed.
    double gauge = 1.0;
    std::size_t iterations = 0;
    /// L1 marginal mismatch at time 0 after each sweep.
    std::vector<double> residual_history;

    /// (lambda u0, vT / lambda).
    BridgeFactors rescaled(double lambda) const;
};

struct IpfOptions {
    double tol = 1e-12;
    std::size_t max_iter = 500;
};

/// Iterative proportional fitting for the boundary-data system
///   rho0(x) = u0(x) int K(x, y) vT(y) dy,   rhoT(y) = vT(y) int u0(x) K(x, y) dx
/// with trapezoid-weighted products. Stops once the time-0 marginal is within
/// `tol` in L1 (the time-T marginal is exact after every sweep).
BridgeFactors solve_boundary_system(const KernelMatrix& K, const BoundaryData& bd, IpfOptions options = {});

/// Both marginals of u0 K vT; the first is at time 0.
std::pair<ScalarField, ScalarField> bridge_marginals(const KernelMatrix& K, const BridgeFactors& f);

/// Space-time lattice of the interpolating diffusion.
struct BridgeSolution {
    TimeGrid lattice;
    double nu;
    FieldSeries u;
    FieldSeries v;
    FieldSeries rho;
    /// Forward drift 2 nu grad ln v.
    FieldSeries b;
    /// Backward drift -2 nu grad ln u.
    FieldSeries b_star;

    const Grid1D& grid() const { return rho.front().grid(); }
    double T() const noexcept { return lattice.t_end(); }
    /// Index of the slice at time t; throws NumericDomainError when t is off the lattice.
    std::size_t slice_index(double t) const;
};

/// Uniform lattice of 101 slices on [0, T].
TimeGrid default_bridge_lattice(double T);

/// Propagates u0 forward and vT backward through `kernel` on `lattice`
/// (lattice.t_start() must be 0 and lattice.t_end() the terminal time).
/// Throws PropagationConsistencyError if some slice's mass departs from 1 by more than 1e-4.
BridgeSolution propagate_factors(const BridgeFactors& f, const Kernel& kernel, const TimeGrid& lattice);

/// Floor applied to factors before logarithms and divisions.
inline constexpr double kFieldFloor = 1e-300;
/// Density below which drift values are excluded from residual norms.
inline constexpr double kTailMask = 1e-12;

/// p(y,s,x,t) = k(y,s,x,t) v(x,t) / v(y,s); s and t must be lattice times.
double forward_transition(const BridgeSolution& sol, const Kernel& kernel, double y, double s, double x, double t);
/// p*(y,s,x,t) = k(y,s,x,t) u(y,s) / u(x,t); s and t must be lattice times.
double backward_transition(const BridgeSolution& sol, const Kernel& kernel, double y, double s, double x, double t);

/// Log-cubic interpolation of a lattice slice at x.
double slice_value(const FieldSeries& series, std::size_t k, double x);

} // namespace sbridge
