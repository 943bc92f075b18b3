#pragma once

#include "sbridge/bridge.hpp"
#include "sbridge/numgrid.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace sbridge {

enum class BoundaryPolicy { Reflect, Absorb };

struct SDEConfig {
    double nu = 1.0;
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    BoundaryPolicy boundary = BoundaryPolicy::Reflect;
    /// Number of equal recording intervals on [0, T]; slices at T*k/n_records.
    std::size_t n_records = 10;
};

/// Drift b(x, t): either a closure or a lattice of fields interpolated linearly in x and t.
class DriftField {
public:
    explicit DriftField(std::function<double(double, double)> f);
    explicit DriftField(FieldSeries series);
    static DriftField zero();

    double operator()(double x, double t) const;

private:
    std::function<double(double, double)> fn_;
    FieldSeries series_;
};

struct PathEnsemble {
    SDEConfig config;
    double T = 0.0;
    std::vector<double> times;
    /// Row-major [path][slice]; NaN after absorption.
    std::vector<double> positions;
    std::size_t live_paths = 0;

    std::size_t n_slices() const noexcept { return times.size(); }
    double at(std::size_t path, std::size_t slice) const { return positions[path * times.size() + slice]; }
    /// Index of the recorded slice at time t (within 1e-9); throws NumericDomainError otherwise.
    std::size_t slice_index(double t) const;
    /// Finite positions at a slice.
    std::vector<double> slice(std::size_t k) const;
};

/// Euler-Maruyama X <- X + b(X,t) dt + sqrt(2 nu dt) xi from rho0 (inverse-CDF sampled)
/// on [0, T]. Paths live on rho0's grid with the configured boundary policy.
/// Throws BoundaryLeakError if fewer than 90% of paths survive absorption.
PathEnsemble simulate_forward(const DriftField& b, const ScalarField& rho0, const SDEConfig& cfg, double T);

/// Reversed clock tau = T - t: Y <- Y - b*(Y, T - tau) dtau + sqrt(2 nu dtau) xi from rhoT.
/// Recorded slices are labelled and ordered in forward time.
PathEnsemble simulate_backward(const DriftField& b_star, const ScalarField& rhoT, const SDEConfig& cfg, double T);

/// Histogram on the grid's trapezoid cells, normalized to unit trapezoid mass.
ScalarField empirical_density(const PathEnsemble& ens, std::size_t slice, const Grid1D& grid);

/// sup |F_n - F| of the samples against a CDF.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);
/// Same, against the piecewise-linear CDF of a gridded density.
double ks_distance(std::span<const double> samples, const ScalarField& density);

/// Standard normal CDF shifted and scaled.
double gaussian_cdf(double x, double mean, double variance);

enum class Direction { Forward, Backward };

/// Time-dependent diffusion coefficient D(t).
using Diffusion = std::function<double(double)>;

/// Max over interior nodes and interior times of |d_t rho + s D Laplace rho + grad(b rho)|
/// with s = -1 for Forward and s = +1 for Backward, excluding nodes where rho < 1e-12.
double fokker_planck_residual(const FieldSeries& rho, const FieldSeries& b, double nu, Direction direction);
double fokker_planck_residual(const FieldSeries& rho, const FieldSeries& b, const Diffusion& diffusion,
                              Direction direction);

/// Max interior |d_t f + b grad f + D Laplace f| (backward Kolmogorov equation in the
/// earlier pair of arguments), excluding nodes where |f| < 1e-12.
double kolmogorov_backward_residual(const FieldSeries& f, const FieldSeries& b, const Diffusion& diffusion);

struct ConditionalDerivatives {
    FieldSeries forward;  ///< D+ f = d_t f + b grad f + nu Laplace f
    FieldSeries backward; ///< D- f = d_t f + b* grad f - nu Laplace f
};

/// f must share the solution's grid and lattice.
ConditionalDerivatives conditional_derivatives(const BridgeSolution& sol, const FieldSeries& f);

struct AccelerationResidual {
    double forward;  ///< max |D+ b - F|
    double backward; ///< max |D- b* - F|
    double max() const noexcept { return forward > backward ? forward : backward; }
};

/// Interior nodes and interior times only, tail-masked at rho < 1e-12.
AccelerationResidual acceleration_residual(const BridgeSolution& sol, const FieldSeries& force);

/// CSV with header path_id,t,x; absorbed samples are omitted.
void write_ensemble_csv(const PathEnsemble& ens, std::ostream& out);

} // namespace sbridge
