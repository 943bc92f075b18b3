#include "sbridge/closed_forms.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sbridge;

namespace {

double heat_value(double nu, double y, double s, double x, double t) {
    const double var = 2.0 * nu * (t - s);
    return std::exp(-(x - y) * (x - y) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// max |K - H| over probe-window pairs, divided by max H.
double relative_to_peak(const KernelMatrix& k, const std::function<double(double, double)>& exact) {
    const Grid1D& g = k.grid;
    double err = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_probe_window(i))
            continue;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!g.in_probe_window(j))
                continue;
            const double e = exact(g.node(i), g.node(j));
            peak = std::max(peak, e);
            err = std::max(err, std::abs(k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - e));
        }
    }
    return err / peak;
}

std::vector<Kernel> analytic_kernels() {
    return {Kernel::heat(1.0),         Kernel::example1(),   Kernel::quantum_k1(),
            Kernel::pinned_example2(), Kernel::quantum_k2(), Kernel::markov_family(0.7, 0.1)};
}

} // namespace

TEST_CASE("analytic kernel values") {
    CHECK(Kernel::example1()(0.0, 0.0, 0.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(Kernel::heat(1.0)(0.0, 0.0, 0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)));
    for (double s : {0.0, 0.2, 0.5, 0.9})
        CHECK(gallery::pinning_coefficient(s, s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gallery::pinning_coefficient(1.0, 0.0) == doctest::Approx(0.0));
    // k1 is the product form p * theta(y,s) / theta(x,t).
    for (double y : {-1.5, 0.0, 2.0})
        for (double x : {-0.5, 1.0}) {
            const double prod = gallery::example1_density(y, 0.2, x, 0.9) * gallery::theta(y, 0.2) / gallery::theta(x, 0.9);
            CHECK(Kernel::quantum_k1()(y, 0.2, x, 0.9) == doctest::Approx(prod).epsilon(1e-13));
            const double prod2 = gallery::pinned_density(y, 0.2, x, 0.9) * gallery::theta(y, 0.2) / gallery::theta(x, 0.9);
            CHECK(Kernel::quantum_k2()(y, 0.2, x, 0.9) == doctest::Approx(prod2).epsilon(1e-13));
        }
}

TEST_CASE("ordering errors") {
    for (const auto& k : analytic_kernels()) {
        CHECK_THROWS_AS(k(0.0, 0.5, 0.0, 0.5), OrderingError);
        CHECK_THROWS_AS(k(0.0, 0.7, 0.0, 0.2), OrderingError);
    }
    CHECK_THROWS_AS(check_chapman_kolmogorov(Kernel::heat(), 0.0, 1.0, 0.5, Grid1D::standard()), OrderingError);
}

TEST_CASE("kernel tags") {
    const auto tags = kernel_tags();
    CHECK(tags.size() == 7);
    CHECK(Kernel::pinned_example2().tag() == "pinned-example2");
    CHECK(Kernel::numeric_fk(Potential::zero(), Grid1D(-5, 5, 65)).tag() == "numeric-fk");
}

TEST_CASE("kernels are strictly positive and continuous on a sampled lattice") {
    const Grid1D g(-3.0, 3.0, 49);
    const double times[] = {0.0, 0.3, 0.6, 1.0};
    for (const auto& k : analytic_kernels()) {
        for (double s : times)
            for (double t : times) {
                if (!(s < t))
                    continue;
                for (std::size_t i = 0; i < g.size(); ++i)
                    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
                        const double a = k(g.node(i), s, g.node(j), t);
                        CHECK(a > 0.0);
                        // Continuity: a small step in x changes the value by a small relative amount.
                        const double b = k(g.node(i), s, g.node(j) + 1e-7, t);
                        CHECK(std::abs(a - b) <= 1e-4 * a);
                    }
            }
    }
}

TEST_CASE("stochastic kernels integrate to one in x") {
    const Grid1D g(-20.0, 20.0, 2001);
    const auto w = trapezoid_weights(g);
    for (const auto& k : {Kernel::heat(0.7), Kernel::example1(), Kernel::pinned_example2(), Kernel::markov_family(1.2, 0.0)}) {
        CHECK(k.is_stochastic());
        for (double y : {-2.0, 0.0, 1.5}) {
            double mass = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j)
                mass += w[j] * k(y, 0.2, g.node(j), 0.8);
            CHECK(std::abs(mass - 1.0) < 1e-6);
        }
    }
    CHECK_FALSE(Kernel::quantum_k1().is_stochastic());
    CHECK_FALSE(Kernel::quantum_k2().is_stochastic());
}

TEST_CASE("Chapman-Kolmogorov discrimination") {
    const Grid1D g = Grid1D::standard();
    CHECK(check_chapman_kolmogorov(Kernel::heat(1.0), 0.0, 0.5, 1.0, g) <= 1e-6);
    CHECK(check_chapman_kolmogorov(Kernel::example1(), 0.0, 0.5, 1.0, g) <= 1e-6);
    CHECK(check_chapman_kolmogorov(Kernel::quantum_k1(), 0.0, 0.5, 1.0, g) <= 1e-6);
    CHECK(check_chapman_kolmogorov(Kernel::markov_family(1.0, 0.0), 0.1, 0.5, 1.0, g) <= 1e-6);
    CHECK(check_chapman_kolmogorov(Kernel::pinned_example2(), 0.0, 0.5, 1.0, g) > 0.01);
    CHECK(check_chapman_kolmogorov(Kernel::quantum_k2(), 0.0, 0.5, 1.0, g) > 0.01);
}

TEST_CASE("short-time moments") {
    SUBCASE("example1 at t = 1") {
        const auto m = short_time_moments(Kernel::example1(), 0.4, 1.0);
        CHECK(std::abs(m.leak_rate) < 1e-3);
        CHECK(std::abs(m.first_moment_rate) < 1e-3);
        CHECK(m.second_moment_rate == doctest::Approx(2.0).epsilon(0.02));
        CHECK(m.table.size() == 3);
        CHECK(m.warning.empty());
    }
    SUBCASE("example1 at t = 0.5") {
        const auto m = short_time_moments(Kernel::example1(), -1.0, 0.5);
        CHECK(m.second_moment_rate == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("heat kernel, any point, with the halved epsilon too") {
        // The halved epsilon needs shorter steps: the leak decays like exp(-eps^2 / (4 dt)).
        const std::vector<double> short_steps{2.5e-3, 1.25e-3, 6.25e-4};
        for (double eps : {1.0, 0.5}) {
            const auto m = short_time_moments(Kernel::heat(1.0), 2.0, 0.3,
                                              eps < 1.0 ? std::span<const double>(short_steps) : std::span<const double>{}, eps);
            CHECK(std::abs(m.leak_rate) < 1e-3);
            CHECK(std::abs(m.first_moment_rate) < 1e-3);
            CHECK(m.second_moment_rate == doctest::Approx(2.0).epsilon(0.02));
        }
    }
    SUBCASE("non-decreasing step list is rejected") {
        const std::vector<double> bad{1e-3, 2e-3};
        CHECK_THROWS_AS(short_time_moments(Kernel::heat(), 0.0, 0.0, bad), NumericDomainError);
    }
}

TEST_CASE("Neville extrapolation removes polynomial step dependence") {
    const std::vector<double> h{0.1, 0.05, 0.025};
    const std::vector<double> v{3.0 + 2 * 0.1 - 0.1 * 0.1, 3.0 + 2 * 0.05 - 0.05 * 0.05, 3.0 + 2 * 0.025 - 0.025 * 0.025};
    CHECK(extrapolate_to_zero(h, v) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("forward drift extraction") {
    const Kernel pinned = Kernel::pinned_example2();
    CHECK(extract_forward_drift(pinned, 2.0, 0.0) == doctest::Approx(-2.0).epsilon(1e-3 / 2.0));
    CHECK(std::abs(extract_forward_drift(pinned, 1.0, 0.5) - gallery::forward_drift(1.0, 0.5)) < 1e-3);
    for (double x : {-1.0, 1.0, 3.0})
        CHECK(std::abs(extract_forward_drift(pinned, x, 1.0)) < 1e-3);
    for (double x : {-2.0, 0.5})
        CHECK(std::abs(extract_forward_drift(Kernel::heat(1.0), x, 0.4)) < 1e-3);
}

TEST_CASE("numeric Feynman-Kac kernel") {
    const Grid1D g = Grid1D::standard();
    SUBCASE("zero potential matches the heat kernel") {
        const auto k = solve_feynman_kac(Potential::zero(1.0), g, 0.0, 0.5, default_substeps(1.0, g, 0.0, 0.5));
        const double err = relative_to_peak(k, [](double y, double x) { return heat_value(1.0, y, 0.0, x, 0.5); });
        CHECK(err <= 1e-3);
        CHECK(k.entries.minCoeff() >= 0.0);
    }
    SUBCASE("zero potential converges at second order") {
        auto err = [](const Grid1D& grid) {
            const auto k = solve_feynman_kac(Potential::zero(1.0), grid, 0.0, 0.5, default_substeps(1.0, grid, 0.0, 0.5));
            return relative_to_peak(k, [](double y, double x) { return heat_value(1.0, y, 0.0, x, 0.5); });
        };
        const Grid1D coarse(-10.0, 10.0, 257);
        const double order = std::log2(err(coarse) / err(coarse.refined(2)));
        CHECK(order >= 1.9);
    }
    SUBCASE("constant potential factorises") {
        const double lambda = 0.8;
        const auto k = solve_feynman_kac(Potential::constant(lambda, 1.0), g, 0.0, 0.5, default_substeps(1.0, g, 0.0, 0.5));
        const double err = relative_to_peak(
            k, [&](double y, double x) { return heat_value(1.0, y, 0.0, x, 0.5) * std::exp(-lambda * 0.5); });
        CHECK(err <= 1e-3);
    }
    SUBCASE("quantum potential propagates theta_star") {
        const double t = 1.0;
        const auto k = solve_feynman_kac(Potential::quantum_half_omega(), g, 0.0, t, default_substeps(1.0, g, 0.0, t));
        const auto w = trapezoid_weights(g);
        double err = 0.0;
        double peak = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double u = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j)
                u += w[j] * gallery::theta_star(g.node(j), 0.0) * k.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            const double exact = gallery::theta_star(g.node(i), t);
            err = std::max(err, std::abs(u - exact));
            peak = std::max(peak, exact);
        }
        CHECK(err / peak <= 1e-3);
    }
    SUBCASE("point evaluation agrees with the matrix") {
        const Grid1D small(-6.0, 6.0, 97);
        const Kernel fk = Kernel::numeric_fk(Potential::constant(0.3), small);
        const auto m = kernel_matrix(fk, small, 0.1, 0.6);
        CHECK(fk(small.node(40), 0.1, small.node(52), 0.6) == doctest::Approx(m.entries(40, 52)).epsilon(1e-12));
        CHECK_THROWS_AS(kernel_matrix(fk, g, 0.1, 0.6), NumericDomainError);
    }
    SUBCASE("too-coarse time stepping of a stiff potential is guarded") {
        // c dt / 2 = 5: the Crank-Nicolson factor is -2/3 per step after the start-up.
        CHECK_THROWS_AS(solve_feynman_kac(Potential::constant(100.0), g, 0.0, 0.5, 5), PositivityError);
    }
}

TEST_CASE("propagation through narrow kernels stays accurate") {
    // example1 at t = 0.01 has width 0.01, far below the grid spacing.
    const Grid1D g = Grid1D::standard();
    const ScalarField rho0 = sample(g, [](double x) { return gallery::rho(x, 0.0); }, 0.0);
    for (double t : {0.01, 0.03, 0.5}) {
        const ScalarField rt = propagate_forward(Kernel::example1(), rho0, t);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(rt[i] - gallery::rho(g.node(i), t)));
        CHECK(err < 1e-9);
    }
    // Backward propagation of theta by k1 reproduces theta at the earlier time.
    const ScalarField th1 = sample(g, [](double x) { return gallery::theta(x, 1.0); }, 1.0);
    const ScalarField th = propagate_backward(Kernel::quantum_k1(), th1, 0.99);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.in_probe_window(i))
            CHECK(th[i] == doctest::Approx(gallery::theta(g.node(i), 0.99)).epsilon(1e-8));
}
