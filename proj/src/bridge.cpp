#include "sbridge/bridge.hpp"

#include "sbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbridge {

namespace {

constexpr double kMassTolerance = 1e-8;
constexpr double kMassDriftLimit = 1e-4;

void validate_density(const ScalarField& f, const char* name) {
    for (double v : f.values())
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("boundary density ") + name + " must be strictly positive and finite");
    const double mass = integrate(f);
    if (std::abs(mass - 1.0) > kMassTolerance) {
        std::ostringstream os;
        os << "boundary density " << name << " has mass " << mass << ", expected 1 within " << kMassTolerance;
        throw ValidationError(os.str());
    }
}

Eigen::VectorXd to_vector(const ScalarField& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

ScalarField to_field(const Grid1D& grid, const Eigen::VectorXd& v, double t) {
    return ScalarField(grid, std::vector<double>(v.data(), v.data() + v.size()), t);
}

// Elementwise target / product, with the incompatibility guard.
Eigen::VectorXd divide_checked(const Eigen::VectorXd& target, const Eigen::VectorXd& product, std::size_t iteration) {
    Eigen::VectorXd out(target.size());
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        const double q = target(i) / product(i);
        if (!(product(i) > 0.0) || !(q > 0.0) || !std::isfinite(q)) {
            std::ostringstream os;
            os << "solve_boundary_system: non-positive or non-finite factor at node " << i << " in sweep "
               << iteration << " (kernel and boundary data incompatible on this grid)";
            throw IncompatibilityError(os.str());
        }
        out(i) = q;
    }
    return out;
}

double weighted_l1(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
    return (w.array() * (a - b).array().abs()).sum();
}

} // namespace

BoundaryData::BoundaryData(ScalarField rho0_in, ScalarField rhoT_in, double T_in)
    : rho0(std::move(rho0_in)), rhoT(std::move(rhoT_in)), T(T_in) {
    if (!(T > 0.0))
        throw ValidationError("boundary data: terminal time must be positive");
    if (!(rho0.grid() == rhoT.grid()))
        throw ValidationError("boundary data: densities live on different grids");
    rho0.set_time(0.0);
    rhoT.set_time(T);
    validate_density(rho0, "rho0");
    validate_density(rhoT, "rhoT");
    // Exact unit mass: any mismatch between the two would floor the IPF residual.
    rho0 = normalize(rho0);
    rhoT = normalize(rhoT);
}

BridgeFactors BridgeFactors::rescaled(double lambda) const {
    if (!(lambda > 0.0))
        throw NumericDomainError("BridgeFactors::rescaled: lambda must be positive");
    BridgeFactors out = *this;
    for (double& x : out.u0.values())
        x *= lambda;
    for (double& x : out.vT.values())
        x /= lambda;
    out.gauge = gauge / lambda;
    return out;
}

BridgeFactors solve_boundary_system(const KernelMatrix& K, const BoundaryData& bd, IpfOptions options) {
    const Grid1D& grid = bd.rho0.grid();
    if (!(K.grid == grid))
        throw NumericDomainError("solve_boundary_system: kernel matrix and boundary data use different grids");
    if (K.s != 0.0 || std::abs(K.t - bd.T) > 1e-12 * std::max(1.0, bd.T))
        throw NumericDomainError("solve_boundary_system: kernel matrix must span [0, T]");
    if (!(options.tol > 0.0) || options.max_iter == 0)
        throw NumericDomainError("solve_boundary_system: tol must be positive and max_iter nonzero");
    if (!(K.entries.minCoeff() > 0.0))
        throw IncompatibilityError("solve_boundary_system: kernel matrix is not strictly positive");

    const auto tw = trapezoid_weights(grid);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tw.data(), static_cast<Eigen::Index>(tw.size()));
    const Eigen::VectorXd rho0 = to_vector(bd.rho0);
    const Eigen::VectorXd rhoT = to_vector(bd.rhoT);

    Eigen::VectorXd u0 = Eigen::VectorXd::Ones(rho0.size());
    Eigen::VectorXd vT = Eigen::VectorXd::Ones(rho0.size());
    BridgeFactors out{bd.rho0, bd.rhoT, 1.0, 0, {}};
    double residual = 0.0;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        u0 = divide_checked(rho0, K.entries * w.cwiseProduct(vT), it);
        vT = divide_checked(rhoT, K.entries.transpose() * w.cwiseProduct(u0), it);
        const Eigen::VectorXd marginal0 = u0.cwiseProduct(K.entries * w.cwiseProduct(vT));
        residual = weighted_l1(marginal0, rho0, w);
        out.residual_history.push_back(residual);
        if (residual < options.tol) {
            out.iterations = it;
            const double mass = w.dot(u0);
            out.gauge = mass;
            out.u0 = to_field(grid, u0 / mass, 0.0);
            out.vT = to_field(grid, vT * mass, bd.T);
            return out;
        }
    }
    std::ostringstream os;
    os << "solve_boundary_system: no convergence after " << options.max_iter << " sweeps, last L1 residual "
       << residual;
    throw NonConvergenceError(os.str(), residual, options.max_iter);
}

std::pair<ScalarField, ScalarField> bridge_marginals(const KernelMatrix& K, const BridgeFactors& f) {
    const auto tw = trapezoid_weights(K.grid);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tw.data(), static_cast<Eigen::Index>(tw.size()));
    const Eigen::VectorXd u0 = to_vector(f.u0);
    const Eigen::VectorXd vT = to_vector(f.vT);
    const Eigen::VectorXd m0 = u0.cwiseProduct(K.entries * w.cwiseProduct(vT));
    const Eigen::VectorXd mT = vT.cwiseProduct(K.entries.transpose() * w.cwiseProduct(u0));
    return {to_field(K.grid, m0, K.s), to_field(K.grid, mT, K.t)};
}

std::size_t BridgeSolution::slice_index(double t) const {
    const double dt = lattice.dt();
    const double pos = (t - lattice.t_start()) / dt;
    const double k = std::round(pos);
    if (k < 0.0 || k > static_cast<double>(lattice.n_steps()) || std::abs(pos - k) > 1e-9) {
        std::ostringstream os;
        os << "time " << t << " is not on the bridge lattice";
        throw NumericDomainError(os.str());
    }
    return static_cast<std::size_t>(k);
}

TimeGrid default_bridge_lattice(double T) { return TimeGrid(0.0, T, 100); }

BridgeSolution propagate_factors(const BridgeFactors& f, const Kernel& kernel, const TimeGrid& lattice) {
    if (lattice.t_start() != 0.0)
        throw NumericDomainError("propagate_factors: lattice must start at 0");
    const double T = f.vT.time();
    if (std::abs(lattice.t_end() - T) > 1e-12 * std::max(1.0, T))
        throw NumericDomainError("propagate_factors: lattice must end at the terminal time of vT");
    for (const ScalarField* x : {&f.u0, &f.vT})
        for (double value : x->values())
            if (!(value > 0.0))
                throw NumericDomainError("propagate_factors: factors must be strictly positive");

    BridgeSolution sol{lattice, kernel.nu(), {}, {}, {}, {}, {}};
    const std::size_t n_slices = lattice.n_slices();
    for (std::size_t k = 0; k < n_slices; ++k) {
        const double t = k + 1 == n_slices ? T : lattice.time(k);
        ScalarField u = k == 0 ? f.u0 : propagate_forward(kernel, f.u0, t);
        ScalarField v = k + 1 == n_slices ? f.vT : propagate_backward(kernel, f.vT, t);
        u.set_time(t);
        v.set_time(t);
        ScalarField rho = pointwise(u, v, [](double a, double b) { return a * b; });
        rho.set_time(t);
        const double mass = integrate(rho);
        if (std::abs(mass - 1.0) > kMassDriftLimit) {
            std::ostringstream os;
            os << "propagate_factors: density mass " << mass << " at t = " << t << " departs from 1 by more than "
               << kMassDriftLimit;
            throw PropagationConsistencyError(os.str());
        }
        ScalarField b = gradient(log_field(v, kFieldFloor));
        ScalarField b_star = gradient(log_field(u, kFieldFloor));
        for (std::size_t i = 0; i < b.size(); ++i) {
            b[i] *= 2.0 * sol.nu;
            b_star[i] *= -2.0 * sol.nu;
        }
        b.set_time(t);
        b_star.set_time(t);
        sol.u.push_back(std::move(u));
        sol.v.push_back(std::move(v));
        sol.rho.push_back(std::move(rho));
        sol.b.push_back(std::move(b));
        sol.b_star.push_back(std::move(b_star));
    }
    return sol;
}

double slice_value(const FieldSeries& series, std::size_t k, double x) {
    return interpolate_log_cubic(series.at(k), x);
}

namespace {

double guarded(double value, const char* context) {
    if (!(value >= kFieldFloor))
        throw NumericDomainError(std::string(context) + ": factor below the division guard");
    return value;
}

} // namespace

double forward_transition(const BridgeSolution& sol, const Kernel& kernel, double y, double s, double x, double t) {
    const double vy = guarded(slice_value(sol.v, sol.slice_index(s), y), "forward_transition");
    const double vx = slice_value(sol.v, sol.slice_index(t), x);
    return kernel(y, s, x, t) * vx / vy;
}

double backward_transition(const BridgeSolution& sol, const Kernel& kernel, double y, double s, double x, double t) {
    const double ux = guarded(slice_value(sol.u, sol.slice_index(t), x), "backward_transition");
    const double uy = slice_value(sol.u, sol.slice_index(s), y);
    return kernel(y, s, x, t) * uy / ux;
}

} // namespace sbridge
