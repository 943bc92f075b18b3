#include "sbridge/gallery.hpp"

#include "sbridge/burgers.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>

namespace sbridge::gallery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOrderLow = 3.5;
constexpr double kOrderHigh = 4.5;
constexpr double kIdentityTol = 1e-6;

// Coarse bases on which every residual is already in its asymptotic regime.
Grid1D order_grid() { return Grid1D(-10.0, 10.0, 201); }
TimeGrid order_lattice() { return TimeGrid(0.0, kTerminalTime, 20); }

CheckResult order_check(std::string name, const ResidualFn& residual, const Grid1D& grid, const TimeGrid& lattice) {
    return CheckResult::within(std::move(name), refinement_ratio(residual, grid, lattice), kOrderLow, kOrderHigh);
}

FieldSeries zeros(const Grid1D& grid, const TimeGrid& lattice) {
    return sample_series(grid, lattice, [](double, double) { return 0.0; });
}

double max_abs_error(const ScalarField& a, const std::function<double(double)>& exact) {
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        err = std::max(err, std::abs(a[i] - exact(a.grid().node(i))));
    return err;
}

double masked_relative_error(const ScalarField& a, const ScalarField& b, const ScalarField& rho) {
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (rho[i] >= kTailMask)
            err = std::max(err, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return err;
}

double masked_abs_error(const FieldSeries& a, double (*exact)(double, double), const FieldSeries& rho) {
    double err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].size(); ++i)
            if (rho[k][i] >= kTailMask)
                err = std::max(err, std::abs(a[k][i] - exact(a[k].grid().node(i), a[k].time())));
    return err;
}

// L1 error of rho(., t) against the kernel propagation of rho(., s).
double propagation_error(const Kernel& kernel, const Grid1D& grid, double s, double t) {
    const ScalarField moved = propagate_forward(kernel, sample(grid, rho, s), t);
    return l1_distance(moved, sample(grid, rho, t));
}

// Pairs (start, end), (first quarter, third quarter), (middle, end) of the lattice.
double worst_propagation_error(const Kernel& kernel, const Grid1D& grid, const TimeGrid& lattice) {
    const std::size_t n = lattice.n_steps();
    double err = 0.0;
    for (auto [a, b] : std::array<std::pair<std::size_t, std::size_t>, 3>{{{0, n}, {n / 4, 3 * n / 4}, {n / 2, n}}})
        if (a < b)
            err = std::max(err, propagation_error(kernel, grid, lattice.time(a), lattice.time(b)));
    return err;
}

struct SystemErrors {
    double initial;
    double terminal;
};

// rho0 = theta*(x,0) int k(x,0,y,T) theta(y,T) dy and rhoT = theta(x,T) int k(y,0,x,T) theta*(y,0) dy.
SystemErrors schrodinger_system_errors(const Kernel& kernel, const Grid1D& grid) {
    const double T = kTerminalTime;
    const ScalarField back = propagate_backward(kernel, sample(grid, theta, T), 0.0);
    const ScalarField fwd = propagate_forward(kernel, sample(grid, theta_star, 0.0), T);
    SystemErrors e{0.0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        e.initial = std::max(e.initial, std::abs(theta_star(x, 0.0) * back[i] - rho(x, 0.0)));
        e.terminal = std::max(e.terminal, std::abs(theta(x, T) * fwd[i] - rho(x, T)));
    }
    return e;
}

double probe_relative_error(const ScalarField& a, double (*exact)(double, double)) {
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.grid().in_probe_window(i)) {
            const double want = exact(a.grid().node(i), a.time());
            err = std::max(err, std::abs(a[i] - want) / std::abs(want));
        }
    return err;
}

void add_factor_checks(CheckReport& report, const Kernel& kernel) {
    const FactorRecovery r = recover_packet_factors(kernel, factor_grid());
    const std::string tag(kernel.tag());
    report.add(CheckResult::at_most("factor u0 vs theta*(.,0) [" + tag + "]", r.u0_error, kIdentityTol));
    report.add(CheckResult::at_most("factor vT vs theta(.,T) [" + tag + "]", r.vT_error, kIdentityTol));
}

} // namespace

CheckResult CheckResult::at_most(std::string name, double value, double tolerance) {
    return within(std::move(name), value, -kInf, tolerance);
}

CheckResult CheckResult::above(std::string name, double value, double threshold) {
    CheckResult c{std::move(name), value, threshold, kInf, false};
    c.pass = value > threshold;
    return c;
}

CheckResult CheckResult::within(std::string name, double value, double lower, double upper) {
    CheckResult c{std::move(name), value, lower, upper, false};
    c.pass = value >= lower && value <= upper;
    return c;
}

bool CheckReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& CheckReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name)
            return c;
    throw ValidationError("no check named '" + std::string(name) + "' in report " + scenario);
}

Grid1D factor_grid() { return Grid1D(-16.0, 16.0, 821); }

BridgeSolution packet_solution(const Grid1D& grid, const TimeGrid& lattice) {
    return BridgeSolution{lattice,
                          1.0,
                          sample_series(grid, lattice, theta_star),
                          sample_series(grid, lattice, theta),
                          sample_series(grid, lattice, rho),
                          sample_series(grid, lattice, forward_drift),
                          sample_series(grid, lattice, backward_drift)};
}

double refinement_ratio(const ResidualFn& residual, const Grid1D& grid, const TimeGrid& lattice) {
    return residual(grid, lattice) / residual(grid.refined(2), lattice.refined(2));
}

ParabolicResiduals verify_parabolic_system(const Grid1D& grid, const TimeGrid& lattice) {
    require_uniform_series(sample_series(grid, lattice, rho), 3);
    const FieldSeries th = sample_series(grid, lattice, theta);
    const FieldSeries ts = sample_series(grid, lattice, theta_star);
    ParabolicResiduals r{0.0, 0.0};
    for (std::size_t k = 1; k + 1 < lattice.n_slices(); ++k) {
        const double t = lattice.time(k);
        const ScalarField dth = time_derivative(th, k, 2);
        const ScalarField dts = time_derivative(ts, k, 2);
        const ScalarField lth = laplacian(th[k]);
        const ScalarField lts = laplacian(ts[k]);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double x = grid.node(i);
            if (rho(x, t) < kTailMask)
                continue;
            const double w = half_omega(x, t);
            r.theta = std::max(r.theta, std::abs(dth[i] + lth[i] - w * th[k][i]));
            r.theta_star = std::max(r.theta_star, std::abs(dts[i] - lts[i] + w * ts[k][i]));
        }
    }
    return r;
}

double product_identity_error(const Grid1D& grid, const TimeGrid& lattice) {
    double err = 0.0;
    for (double t : lattice.times())
        for (double x : grid.nodes())
            err = std::max(err, std::abs(theta(x, t) * theta_star(x, t) - rho(x, t)));
    return err;
}

double quantum_potential_error(const Grid1D& grid, const TimeGrid& lattice) {
    double err = 0.0;
    for (double t : lattice.times()) {
        const ScalarField root = sample(grid, [t](double x) { return std::sqrt(rho(x, t)); }, t);
        const ScalarField lap = laplacian(root);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double x = grid.node(i);
            if (rho(x, t) < kTailMask)
                continue;
            err = std::max(err, std::abs(2.0 * lap[i] / root[i] - half_omega(x, t)));
        }
    }
    return err;
}

double psi_consistency_error() {
    constexpr double h = 1e-4;
    double err = 0.0;
    for (double t : {0.0, 0.3, 0.7, 1.0})
        for (double x = -3.0; x <= 3.0; x += 0.25) {
            const std::complex<double> p = psi(x, t);
            // grad ln psi = grad R + i grad S.
            const std::complex<double> dlog = (psi(x + h, t) - psi(x - h, t)) / (2.0 * h) / p;
            const double dR = dlog.real();
            const double dS = dlog.imag();
            err = std::max({err, std::abs(std::norm(p) - rho(x, t)), std::abs(2.0 * (dR + dS) - forward_drift(x, t)),
                            std::abs(2.0 * (dS - dR) - backward_drift(x, t)),
                            std::abs(2.0 * dS - current_velocity(x, t))});
        }
    return err;
}

FactorRecovery recover_packet_factors(const Kernel& kernel, const Grid1D& grid) {
    const double T = kTerminalTime;
    const BoundaryData bd(sample(grid, rho, 0.0), sample(grid, rho, T), T);
    BridgeFactors f = solve_boundary_system(kernel_matrix(kernel, grid, 0.0, T), bd);
    // Gauge with unit mass of u0; then u0 vT = rho at the end points fixes vT.
    const ScalarField want_u = normalize(sample(grid, theta_star, 0.0));
    const double scale = integrate(sample(grid, theta_star, 0.0));
    const ScalarField want_v = sample(grid, [&](double x) { return theta(x, T) * scale; }, T);
    return {masked_relative_error(f.u0, want_u, bd.rho0), masked_relative_error(f.vT, want_v, bd.rhoT),
            std::move(f)};
}

CheckReport quantum_free_suite(const Grid1D& grid, const TimeGrid& lattice) {
    CheckReport report{"quantum-free", {}};
    const Grid1D og = order_grid();
    const TimeGrid ol = order_lattice();
    // The theta residual is dominated by the time stencil; a finer time base keeps it asymptotic.
    const TimeGrid parabolic(0.0, kTerminalTime, 80);

    report.add(CheckResult::at_most("psi finite differences vs closed forms", psi_consistency_error(), 1e-8));
    report.add(CheckResult::at_most("theta theta* = rho", product_identity_error(grid, lattice), 1e-12));
    report.add(order_check("2 Laplace sqrt(rho) / sqrt(rho) - Omega/2, error order", quantum_potential_error, og, ol));
    report.add(order_check("theta parabolic residual order",
                           [](const Grid1D& g, const TimeGrid& l) { return verify_parabolic_system(g, l).theta; }, og,
                           parabolic));
    report.add(order_check("theta* parabolic residual order",
                           [](const Grid1D& g, const TimeGrid& l) { return verify_parabolic_system(g, l).theta_star; },
                           og, parabolic));

    const auto fp = [](Direction dir) {
        return [dir](const Grid1D& g, const TimeGrid& l) {
            return fokker_planck_residual(sample_series(g, l, rho),
                                          sample_series(g, l, dir == Direction::Forward ? forward_drift : backward_drift),
                                          1.0, dir);
        };
    };
    report.add(order_check("forward Fokker-Planck residual order", fp(Direction::Forward), og, ol));
    report.add(order_check("backward Fokker-Planck residual order", fp(Direction::Backward), og, ol));

    // The Burgers velocity b* as a continuity-equation velocity leaves an O(1) residual.
    {
        const FieldSeries r = sample_series(og, ol, rho);
        const FieldSeries bs = sample_series(og, ol, backward_drift);
        const double continuity = fokker_planck_residual(r, bs, [](double) { return 0.0; }, Direction::Forward);
        const double fokker = fokker_planck_residual(r, bs, 1.0, Direction::Backward);
        report.add(CheckResult::above("continuity / backward Fokker-Planck residual", continuity / fokker, 100.0));
    }

    const auto force = [](double x, double t) { return 2.0 * half_omega_gradient(x, t); };
    report.add(order_check(
        "Burgers residual order",
        [&](const Grid1D& g, const TimeGrid& l) {
            const FieldSeries r = sample_series(g, l, rho);
            return burgers_residual(sample_series(g, l, backward_drift), 1.0, sample_series(g, l, force), &r);
        },
        og, ol));
    report.add(order_check(
        "forward acceleration residual order",
        [&](const Grid1D& g, const TimeGrid& l) {
            return acceleration_residual(packet_solution(g, l), sample_series(g, l, force)).forward;
        },
        og, ol));
    report.add(order_check(
        "backward acceleration residual order",
        [&](const Grid1D& g, const TimeGrid& l) {
            return acceleration_residual(packet_solution(g, l), sample_series(g, l, force)).backward;
        },
        og, ol));

    {
        const TimeGrid fine(0.0, kTerminalTime, 200);
        const FieldSeries r = sample_series(grid, fine, rho);
        const FieldSeries w = sample_series(grid, fine, half_omega);
        const auto cp = compatibility_potential(sample_series(grid, fine, forward_drift), 1.0);
        double spread = 0.0;
        for (std::size_t k = 0; k < fine.n_slices(); ++k)
            spread = std::max(spread, spatial_spread(cp.c[k], w[k], &r[k]));
        report.add(CheckResult::at_most("compatibility potential minus Omega/2, spatial spread", spread, 1e-6));
    }

    {
        const Grid1D fg = factor_grid();
        const Kernel k1 = Kernel::quantum_k1();
        const FactorRecovery f = recover_packet_factors(k1, fg);
        const BridgeSolution sol = propagate_factors(f.factors, k1, TimeGrid(0.0, kTerminalTime, 10));
        report.add(CheckResult::at_most("bridge forward drift vs closed form", masked_abs_error(sol.b, forward_drift, sol.rho),
                                        1e-4));
        report.add(CheckResult::at_most("bridge backward drift vs closed form",
                                        masked_abs_error(sol.b_star, backward_drift, sol.rho), 1e-4));
    }
    return report;
}

CheckReport example1_suite(const Grid1D& grid, const TimeGrid& lattice) {
    CheckReport report{"example1", {}};
    const Kernel p = Kernel::example1();
    const Kernel k1 = Kernel::quantum_k1();

    report.add(CheckResult::at_most("driftless kernel propagates rho (L1)", worst_propagation_error(p, grid, lattice), kIdentityTol));
    report.add(order_check(
        "forward equation d_t p = t Laplace_x p, residual order",
        [](const Grid1D& g, const TimeGrid& l) {
            return fokker_planck_residual(sample_series(g, l, [](double x, double t) { return example1_density(0.3, 0.0, x, t); }),
                                          zeros(g, l), [](double t) { return t; }, Direction::Forward);
        },
        order_grid(), TimeGrid(0.5, kTerminalTime, 40)));
    report.add(order_check(
        "adjoint equation d_s p = -s Laplace_y p, residual order",
        [](const Grid1D& g, const TimeGrid& l) {
            return kolmogorov_backward_residual(
                sample_series(g, l, [](double y, double s) { return example1_density(y, s, 0.3, kTerminalTime); }),
                zeros(g, l), [](double s) { return s; });
        },
        Grid1D(-8.0, 8.0, 321), TimeGrid(0.0, 0.6, 24)));

    report.add(CheckResult::at_most("Chapman-Kolmogorov residual [example1]",
                                    check_chapman_kolmogorov(p, 0.0, 0.5, kTerminalTime, grid), kIdentityTol));
    report.add(CheckResult::at_most("Chapman-Kolmogorov residual [quantum-k1]",
                                    check_chapman_kolmogorov(k1, 0.0, 0.5, kTerminalTime, grid), kIdentityTol));

    double forward_weighted = 0.0;
    double adjoint_weighted = 0.0;
    for (auto [s, t] : std::array<std::pair<double, double>, 2>{{{0.0, 1.0}, {0.25, 0.75}}}) {
        ScalarField back = propagate_backward(k1, sample(grid, theta, t), s);
        forward_weighted = std::max(forward_weighted, probe_relative_error(back, theta));
        ScalarField fwd = propagate_forward(k1, sample(grid, theta_star, s), t);
        adjoint_weighted = std::max(adjoint_weighted, probe_relative_error(fwd, theta_star));
    }
    report.add(CheckResult::at_most("int k1(x,s,y,t) theta(y,t) dy = theta(x,s)", forward_weighted, kIdentityTol));
    report.add(CheckResult::at_most("int k1(y,s,x,t) theta*(y,s) dy = theta*(x,t)", adjoint_weighted, kIdentityTol));

    const SystemErrors sys = schrodinger_system_errors(k1, grid);
    report.add(CheckResult::at_most("Schrodinger system with k1, rho0", sys.initial, kIdentityTol));
    report.add(CheckResult::at_most("Schrodinger system with k1, rhoT", sys.terminal, kIdentityTol));
    add_factor_checks(report, k1);

    for (double t : {0.5, 1.0}) {
        const MomentRates m = short_time_moments(p, 0.5, t);
        const std::string at = " at t = " + std::string(t == 0.5 ? "0.5" : "1");
        report.add(CheckResult::at_most("leak rate" + at, std::abs(m.leak_rate), 1e-3));
        report.add(CheckResult::at_most("first moment rate" + at, std::abs(m.first_moment_rate), 1e-3));
        report.add(CheckResult::at_most("second moment rate / 2t - 1" + at,
                                        std::abs(m.second_moment_rate / (2.0 * t) - 1.0), 0.02));
    }
    // The driftless kernel carries the same density as the packet, yet its drift is not the packet's.
    const double x = 1.0;
    const double t = 0.5;
    report.add(CheckResult::at_most("extracted drift of the driftless kernel", std::abs(extract_forward_drift(p, x, t)),
                                    1e-3));
    report.add(CheckResult::above("packet forward drift magnitude at (1, 0.5)", std::abs(forward_drift(x, t)), 0.1));
    return report;
}

CheckReport example2_suite(const Grid1D& grid, const TimeGrid& lattice) {
    CheckReport report{"example2", {}};
    const Kernel p = Kernel::pinned_example2();
    const Kernel k2 = Kernel::quantum_k2();

    report.add(CheckResult::at_most("pinned kernel propagates rho (L1)", worst_propagation_error(p, grid, lattice), kIdentityTol));
    report.add(CheckResult::above("Chapman-Kolmogorov violation [pinned-example2]",
                                  check_chapman_kolmogorov(p, 0.0, 0.5, kTerminalTime, grid), 0.01));

    const SystemErrors sys = schrodinger_system_errors(k2, grid);
    report.add(CheckResult::at_most("Schrodinger system with k2, rho0", sys.initial, kIdentityTol));
    report.add(CheckResult::at_most("Schrodinger system with k2, rhoT", sys.terminal, kIdentityTol));
    add_factor_checks(report, k2);
    {
        const Grid1D fg = factor_grid();
        const FactorRecovery a = recover_packet_factors(Kernel::quantum_k1(), fg);
        const FactorRecovery b = recover_packet_factors(k2, fg);
        const ScalarField rho0 = sample(fg, rho, 0.0);
        const ScalarField rhoT = sample(fg, rho, kTerminalTime);
        report.add(CheckResult::at_most(
            "k1 and k2 give the same factor pair",
            std::max(masked_relative_error(a.factors.u0, b.factors.u0, rho0),
                     masked_relative_error(a.factors.vT, b.factors.vT, rhoT)),
            2.0 * kIdentityTol));
    }

    double drift = 0.0;
    for (auto [x, t] : std::array<std::pair<double, double>, 3>{{{2.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}}})
        drift = std::max(drift, std::abs(extract_forward_drift(p, x, t) - forward_drift(x, t)));
    report.add(CheckResult::at_most("extracted drift vs -(1-t)x/(1+t^2)", drift, 1e-3));

    constexpr double label_y = 1.0;
    constexpr double label_s = 0.2;
    report.add(order_check(
        "pinned forward equation with drift y dc/dt, residual order",
        [](const Grid1D& g, const TimeGrid& l) {
            return fokker_planck_residual(
                sample_series(g, l, [](double x, double t) { return pinned_density(label_y, label_s, x, t); }),
                sample_series(g, l, [](double, double t) { return pinned_drift(label_y, label_s, t); }), 1.0,
                Direction::Forward);
        },
        order_grid(), TimeGrid(0.5, kTerminalTime, 40)));

    // Markov family: (a) delta limit, (b) flow of the pinned density, (c) Chapman-Kolmogorov.
    const Kernel family = Kernel::markov_family(label_y, label_s);
    {
        const double t1 = 0.5;
        const ScalarField phi = sample(grid, [](double x) { return std::exp(-x * x / 8.0) * std::cos(x); });
        const std::vector<double> steps = default_limit_steps();
        std::vector<ScalarField> pulled;
        for (double e : steps) {
            ScalarField g = phi;
            g.set_time(t1 + e);
            pulled.push_back(propagate_backward(family, g, t1));
        }
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid.in_probe_window(i))
                continue;
            std::vector<double> values;
            for (const auto& f : pulled)
                values.push_back(f[i]);
            err = std::max(err, std::abs(extrapolate_to_zero(steps, values) - phi[i]));
        }
        report.add(CheckResult::at_most("Markov family (a) delta limit", err, kIdentityTol));
    }
    {
        const double t1 = 0.5;
        const double t2 = kTerminalTime;
        const ScalarField start = sample(grid, [](double x) { return pinned_density(label_y, label_s, x, 0.5); }, t1);
        const ScalarField moved = propagate_forward(family, start, t2);
        report.add(CheckResult::at_most(
            "Markov family (b) flow of the pinned density",
            max_abs_error(moved, [&](double x) { return pinned_density(label_y, label_s, x, t2); }), kIdentityTol));
    }
    report.add(CheckResult::at_most("Markov family (c) Chapman-Kolmogorov",
                                    check_chapman_kolmogorov(family, 0.4, 0.7, kTerminalTime, grid), kIdentityTol));
    return report;
}

std::vector<std::string> scenario_names() { return {"quantum-free", "example1", "example2"}; }

CheckReport run_scenario(std::string_view name) {
    return run_scenario(name, Grid1D::standard(), default_bridge_lattice(kTerminalTime));
}

CheckReport run_scenario(std::string_view name, const Grid1D& grid, const TimeGrid& lattice) {
    if (name == "quantum-free")
        return quantum_free_suite(grid, lattice);
    if (name == "example1")
        return example1_suite(grid, lattice);
    if (name == "example2")
        return example2_suite(grid, lattice);
    throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

} // namespace sbridge::gallery
