// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "sbridge/bridge.hpp"
#include "sbridge/burgers.hpp"
#include "sbridge/closed_forms.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/gallery.hpp"
#include "sbridge/kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sbridge;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what, double value) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? "; " : "") << what << " = " << value << (ok ? "" : " [!]");
    }
};

double tail_masked_drift_error(const FieldSeries& field, double (*exact)(double, double), const FieldSeries& rho) {
    double err = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k)
        for (std::size_t i = 1; i + 1 < field[k].size(); ++i)
            if (rho[k][i] >= kTailMask)
                err = std::max(err, std::abs(field[k][i] - exact(field[k].grid().node(i), field[k].time())));
    return err;
}

double sample_variance(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs)
        m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs)
        v += (x - m) * (x - m);
    return v / static_cast<double>(xs.size() - 1);
}

ScalarField gaussian_density(const Grid1D& g, double mean, double var) {
    return normalize(sample(g, [=](double x) { return gallery::gaussian(x, mean, var); }));
}

// ---------------------------------------------------------------------------

Outcome bridge_uniqueness() {
    Outcome o;
    const Grid1D g = gallery::factor_grid();
    const auto r1 = gallery::recover_packet_factors(Kernel::quantum_k1(), g);
    const auto r2 = gallery::recover_packet_factors(Kernel::quantum_k2(), g);
    o.expect(r1.u0_error < 1e-6, "k1 u0 rel err", r1.u0_error);
    o.expect(r1.vT_error < 1e-6, "k1 vT rel err", r1.vT_error);
    o.expect(r2.u0_error < 1e-6, "k2 u0 rel err", r2.u0_error);
    o.expect(r2.vT_error < 1e-6, "k2 vT rel err", r2.vT_error);
    return o;
}

Outcome drift_reconstruction() {
    Outcome o;
    const Kernel k1 = Kernel::quantum_k1();
    const auto r = gallery::recover_packet_factors(k1, gallery::factor_grid());
    const BridgeSolution sol = propagate_factors(r.factors, k1, default_bridge_lattice(1.0));
    const double eb = tail_masked_drift_error(sol.b, gallery::forward_drift, sol.rho);
    const double ebs = tail_masked_drift_error(sol.b_star, gallery::backward_drift, sol.rho);
    o.expect(eb < 1e-4, "max |b + (1-t)x/(1+t^2)|", eb);
    o.expect(ebs < 1e-4, "max |b* - x(1+t)/(1+t^2)|", ebs);
    return o;
}

Outcome chapman_kolmogorov() {
    Outcome o;
    const Grid1D g = Grid1D::standard();
    const double p = check_chapman_kolmogorov(Kernel::example1(), 0.0, 0.5, 1.0, g);
    const double k1 = check_chapman_kolmogorov(Kernel::quantum_k1(), 0.0, 0.5, 1.0, g);
    // The family needs label s below the first time.
    const double fam = check_chapman_kolmogorov(Kernel::markov_family(1.0, 0.0), 0.1, 0.5, 1.0, g);
    const double pinned = check_chapman_kolmogorov(Kernel::pinned_example2(), 0.0, 0.5, 1.0, g);
    o.expect(p <= 1e-6, "driftless kernel", p);
    o.expect(k1 <= 1e-6, "k1", k1);
    o.expect(fam <= 1e-6, "Markov family", fam);
    o.expect(pinned > 0.01, "pinned kernel violation", pinned);
    return o;
}

Outcome short_time_moment_rates() {
    Outcome o;
    for (double t : {0.5, 1.0}) {
        const MomentRates m = short_time_moments(Kernel::example1(), 0.3, t);
        const std::string at = " (t=" + std::string(t == 0.5 ? "0.5" : "1") + ")";
        o.expect(std::abs(m.second_moment_rate / (2.0 * t) - 1.0) <= 0.02, "second rate / 2t - 1" + at,
                 m.second_moment_rate / (2.0 * t) - 1.0);
        o.expect(std::abs(m.leak_rate) < 1e-3, "leak" + at, m.leak_rate);
        o.expect(std::abs(m.first_moment_rate) < 1e-3, "first rate" + at, m.first_moment_rate);
    }
    return o;
}

Outcome drift_extraction() {
    Outcome o;
    const Kernel pinned = Kernel::pinned_example2();
    for (auto [x, t] : std::vector<std::pair<double, double>>{{2.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}}) {
        const double err = std::abs(extract_forward_drift(pinned, x, t) - gallery::forward_drift(x, t));
        std::ostringstream label;
        label << "err at (" << x << "," << t << ")";
        o.expect(err < 1e-3, label.str(), err);
    }
    return o;
}

Outcome pde_residual_orders() {
    Outcome o;
    const auto qf = gallery::run_scenario("quantum-free");
    const auto e1 = gallery::run_scenario("example1");
    const auto e2 = gallery::run_scenario("example2");
    const std::vector<std::pair<const gallery::CheckReport*, std::string>> picks{
        {&qf, "forward Fokker-Planck residual order"},
        {&qf, "backward Fokker-Planck residual order"},
        {&qf, "Burgers residual order"},
        {&qf, "forward acceleration residual order"},
        {&qf, "backward acceleration residual order"},
        {&qf, "theta parabolic residual order"},
        {&qf, "theta* parabolic residual order"},
        {&e1, "forward equation d_t p = t Laplace_x p, residual order"},
        {&e1, "adjoint equation d_s p = -s Laplace_y p, residual order"},
        {&e2, "pinned forward equation with drift y dc/dt, residual order"},
    };
    for (const auto& [report, name] : picks) {
        const auto& c = report->find(name);
        o.expect(c.pass, name, c.value);
    }
    return o;
}

Outcome compatibility() {
    Outcome o;
    const Grid1D g = Grid1D::standard();
    const TimeGrid lattice(0.0, 1.0, 200);
    const FieldSeries rho = sample_series(g, lattice, gallery::rho);
    const FieldSeries omega = sample_series(g, lattice, gallery::half_omega);
    const auto cp = compatibility_potential(sample_series(g, lattice, gallery::forward_drift), 1.0);
    double spread = 0.0;
    for (std::size_t k = 0; k < lattice.n_slices(); ++k)
        spread = std::max(spread, spatial_spread(cp.c[k], omega[k], &rho[k]));
    o.expect(spread < 1e-6, "max spatial spread of c - Omega/2", spread);
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    const Grid1D g = Grid1D::standard();
    SDEConfig cfg;
    cfg.nu = 1.0;
    cfg.n_paths = 100000;
    cfg.dt = 1e-3;
    cfg.seed = 20240611;
    const PathEnsemble fwd = simulate_forward(DriftField(gallery::forward_drift), sample(g, gallery::rho, 0.0), cfg, 1.0);
    for (double t : {0.5, 1.0}) {
        const double rel = sample_variance(fwd.slice(fwd.slice_index(t))) / (1.0 + t * t) - 1.0;
        o.expect(std::abs(rel) < 0.02, "variance / (1+t^2) - 1 at t=" + std::string(t == 0.5 ? "0.5" : "1"), rel);
    }
    double ks = 0.0;
    for (std::size_t k = 1; k < fwd.n_slices(); ++k) {
        const double t = fwd.times[k];
        ks = std::max(ks, ks_distance(fwd.slice(k), [t](double x) { return gaussian_cdf(x, 0.0, 1.0 + t * t); }));
    }
    o.expect(ks < 0.02, "forward max KS", ks);
    const PathEnsemble bwd =
        simulate_backward(DriftField(gallery::backward_drift), sample(g, gallery::rho, 1.0), cfg, 1.0);
    const double ks0 = ks_distance(bwd.slice(0), [](double x) { return gaussian_cdf(x, 0.0, 1.0); });
    o.expect(ks0 < 0.02, "backward KS vs rho0", ks0);
    return o;
}

Outcome identities() {
    Outcome o;
    const Grid1D g(-10.0, 10.0, 201);
    const Kernel heat = Kernel::heat(1.0);
    const BoundaryData bd(gaussian_density(g, -1.0, 1.0), gaussian_density(g, 0.5, 0.7), 1.0);
    const BridgeFactors f = solve_boundary_system(kernel_matrix(heat, g, 0.0, 1.0), bd);
    const TimeGrid lattice(0.0, 1.0, 8);
    const BridgeSolution sol = propagate_factors(f, heat, lattice);

    // rho(x,t) p*(y,s,x,t) = p(y,s,x,t) rho(y,s) at random lattice points.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> node(20, 180);
    std::uniform_int_distribution<std::size_t> slice(0, lattice.n_steps());
    double eq9 = 0.0;
    for (int checked = 0; checked < 100;) {
        std::size_t a = slice(rng);
        std::size_t b = slice(rng);
        if (a == b)
            continue;
        if (a > b)
            std::swap(a, b);
        const double s = lattice.time(a);
        const double t = lattice.time(b);
        const double y = g.node(node(rng));
        const double x = g.node(node(rng));
        const double lhs = slice_value(sol.rho, b, x) * backward_transition(sol, heat, y, s, x, t);
        const double rhs = forward_transition(sol, heat, y, s, x, t) * slice_value(sol.rho, a, y);
        eq9 = std::max(eq9, std::abs(lhs - rhs) / std::abs(rhs));
        ++checked;
    }
    o.expect(eq9 < 1e-10, "time-reversal identity rel err", eq9);

    double uv = 0.0;
    for (std::size_t k = 0; k < lattice.n_slices(); ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            uv = std::max(uv, std::abs(sol.rho[k][i] - sol.u[k][i] * sol.v[k][i]));
    o.expect(uv <= 1e-12, "max |rho - u v|", uv);

    double gauge_rho = 0.0;
    double gauge_drift = 0.0;
    double gauge_p = 0.0;
    for (double lambda : {1e-3, 3.7, 250.0}) {
        const BridgeSolution other = propagate_factors(f.rescaled(lambda), heat, lattice);
        for (std::size_t k = 0; k < lattice.n_slices(); ++k)
            for (std::size_t i = 0; i < g.size(); ++i) {
                gauge_rho = std::max(gauge_rho, std::abs(sol.rho[k][i] - other.rho[k][i]) / sol.rho[k][i]);
                if (sol.rho[k][i] < kTailMask)
                    continue;
                gauge_drift = std::max({gauge_drift, std::abs(sol.b[k][i] - other.b[k][i]),
                                        std::abs(sol.b_star[k][i] - other.b_star[k][i])});
            }
        for (double y : {-1.0, 0.5})
            for (double x : {-0.2, 1.1}) {
                const double pa = forward_transition(sol, heat, y, 0.25, x, 0.75);
                const double qa = backward_transition(sol, heat, y, 0.25, x, 0.75);
                gauge_p = std::max({gauge_p, std::abs(pa - forward_transition(other, heat, y, 0.25, x, 0.75)) / pa,
                                    std::abs(qa - backward_transition(other, heat, y, 0.25, x, 0.75)) / qa});
            }
    }
    o.expect(gauge_rho <= 1e-13, "gauge rel change of rho", gauge_rho);
    o.expect(gauge_drift <= 1e-10, "gauge change of b, b*", gauge_drift);
    o.expect(gauge_p <= 1e-13, "gauge rel change of p, p*", gauge_p);

    const Grid1D hg(-6.0, 6.0, 121);
    std::mt19937_64 hr(99);
    std::uniform_real_distribution<double> coeff(-1.5, 1.5);
    std::uniform_int_distribution<std::size_t> anchor(0, hg.size() - 1);
    double hc = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const double c1 = coeff(hr), c2 = coeff(hr), c3 = coeff(hr), nu = 0.3 + std::abs(coeff(hr));
        const ScalarField v = sample(hg, [&](double x) { return c1 * std::sin(c2 * x) + c3 * std::tanh(x) + 0.1 * c1 * x; });
        const ScalarField back = hopf_cole_forward(hopf_cole_inverse(v, nu, anchor(hr)), nu);
        for (std::size_t i = 1; i + 1 < hg.size(); ++i)
            hc = std::max(hc, std::abs(back[i] - v[i]));
    }
    o.expect(hc < 1e-10, "Hopf-Cole round trip", hc);
    return o;
}

double heat_value(double y, double x, double dt) {
    const double var = 2.0 * dt;
    return std::exp(-(x - y) * (x - y) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// max |K - H| over probe-window pairs, relative to the kernel peak.
double heat_error(const Grid1D& g) {
    const auto k = solve_feynman_kac(Potential::zero(1.0), g, 0.0, 0.5, default_substeps(1.0, g, 0.0, 0.5));
    double err = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_probe_window(i))
            continue;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!g.in_probe_window(j))
                continue;
            const double e = heat_value(g.node(i), g.node(j), 0.5);
            peak = std::max(peak, e);
            err = std::max(err, std::abs(k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - e));
        }
    }
    return err / peak;
}

Outcome numeric_feynman_kac() {
    Outcome o;
    const Grid1D g = Grid1D::standard();
    const double err = heat_error(g);
    o.expect(err <= 1e-3, "c=0 interior rel err", err);
    const Grid1D coarse(-10.0, 10.0, 257);
    const double order = std::log2(heat_error(coarse) / heat_error(coarse.refined(2)));
    o.expect(order >= 1.9, "observed order", order);

    const double t = 1.0;
    const auto k = solve_feynman_kac(Potential::quantum_half_omega(), g, 0.0, t, default_substeps(1.0, g, 0.0, t));
    const auto w = trapezoid_weights(g);
    double perr = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double u = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            u += w[j] * gallery::theta_star(g.node(j), 0.0) *
                 k.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        const double exact = gallery::theta_star(g.node(i), t);
        perr = std::max(perr, std::abs(u - exact));
        peak = std::max(peak, exact);
    }
    o.expect(perr / peak <= 1e-3, "c=Omega/2 propagation rel err", perr / peak);
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bridge uniqueness (k1 and k2 recover the packet factors)", bridge_uniqueness},
        {"drift reconstruction", drift_reconstruction},
        {"Chapman-Kolmogorov discrimination", chapman_kolmogorov},
        {"short-time moments of the driftless kernel", short_time_moment_rates},
        {"drift extraction from the pinned kernel", drift_extraction},
        {"PDE residuals at second order", pde_residual_orders},
        {"compatibility condition", compatibility},
        {"Monte Carlo consistency", monte_carlo},
        {"identity suite", identities},
        {"numeric Feynman-Kac kernel", numeric_feynman_kac},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
