#include "sbridge/errors.hpp"
#include "sbridge/numgrid.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace sbridge;

namespace {

double max_interior_error(const ScalarField& f, const std::function<double(double)>& exact) {
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
        err = std::max(err, std::abs(f[i] - exact(f.grid().node(i))));
    return err;
}

// Random smooth field: a few Gaussian bumps with random centres and widths.
ScalarField random_smooth(const Grid1D& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> centre(-4.0, 4.0);
    std::uniform_real_distribution<double> width(0.7, 2.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    double c[3], w[3], a[3];
    for (int k = 0; k < 3; ++k) {
        c[k] = centre(rng);
        w[k] = width(rng);
        a[k] = amp(rng);
    }
    return sample(grid, [&](double x) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
            v += a[k] * std::exp(-(x - c[k]) * (x - c[k]) / (2 * w[k] * w[k]));
        return v;
    });
}

} // namespace

TEST_CASE("grid construction and invariants") {
    const Grid1D g(0.0, 1.0, 11);
    CHECK(g.spacing() == doctest::Approx(0.1));
    CHECK(g.node(10) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Grid1D(1.0, 0.0, 11), NumericDomainError);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), NumericDomainError);
    CHECK(Grid1D::standard().size() == 513);
    CHECK(g.refined(2).size() == 21);
    CHECK_THROWS_AS(TimeGrid(1.0, 0.5, 4), NumericDomainError);
    const TimeGrid tg(0.0, 1.0, 100);
    CHECK(tg.n_slices() == 101);
    CHECK(tg.time(100) == 1.0);
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>(5, 0.0)), NumericDomainError);
}

TEST_CASE("integrate") {
    SUBCASE("constant on the unit interval is exact") {
        for (std::size_t n : {3u, 10u, 257u}) {
            const Grid1D g(0.0, 1.0, n);
            CHECK(integrate(sample(g, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    SUBCASE("standard normal on [-10, 10] against the error-function value") {
        const Grid1D g(-10.0, 10.0, 2001);
        const double exact = std::erf(10.0 / std::numbers::sqrt2);
        const double value = integrate(sample(g, [](double x) {
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        }));
        CHECK(std::abs(value - exact) < 1e-8);
        CHECK(std::abs(value - 1.0) < 1e-8);
    }
    SUBCASE("odd integrand vanishes") {
        const Grid1D g(-3.0, 3.0, 301);
        CHECK(std::abs(integrate(sample(g, [](double x) { return x; }))) < 1e-12);
    }
    SUBCASE("non-finite entries are rejected") {
        ScalarField f(Grid1D(0.0, 1.0, 5));
        f[2] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(integrate(f), NumericDomainError);
    }
}

TEST_CASE("integrate is linear on random fields") {
    std::mt19937_64 rng(7);
    const Grid1D g(-8.0, 8.0, 401);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField f = random_smooth(g, rng);
        const ScalarField h = random_smooth(g, rng);
        const double a = coeff(rng);
        const double b = coeff(rng);
        const ScalarField combo = pointwise(f, h, [&](double x, double y) { return a * x + b * y; });
        const double lhs = integrate(combo);
        const double rhs = a * integrate(f) + b * integrate(h);
        CHECK(std::abs(lhs - rhs) < 1e-13 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("gradient") {
    const Grid1D g(-2.0, 3.0, 101);
    SUBCASE("constant") {
        const auto d = gradient(sample(g, [](double) { return 4.2; }));
        for (double v : d.values())
            CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("quadratic is exact, boundary stencils included") {
        const auto d = gradient(sample(g, [](double x) { return x * x; }));
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(d[i] == doctest::Approx(2.0 * g.node(i)).epsilon(1e-10));
    }
    SUBCASE("sin converges at second order") {
        const Grid1D coarse(0.0, 3.0, 61);
        const Grid1D fine = coarse.refined(2);
        const auto err = [](const Grid1D& grid) {
            return max_interior_error(gradient(sample(grid, [](double x) { return std::sin(x); })),
                                      [](double x) { return std::cos(x); });
        };
        const double ratio = err(coarse) / err(fine);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
        CHECK(std::log2(ratio) >= 1.9);
    }
    SUBCASE("parity: odd field gives even gradient on a symmetric grid") {
        const Grid1D sym(-5.0, 5.0, 201);
        const auto d = gradient(sample(sym, [](double x) { return x * std::exp(-x * x / 3.0); }));
        for (std::size_t i = 0; i < sym.size(); ++i)
            CHECK(std::abs(d[i] - d[sym.size() - 1 - i]) < 1e-12);
    }
}

TEST_CASE("laplacian") {
    const Grid1D g(-6.0, 6.0, 241);
    SUBCASE("constant") {
        const auto l = laplacian(sample(g, [](double) { return -1.5; }));
        for (double v : l.values())
            CHECK(std::abs(v) < 1e-9);
    }
    SUBCASE("quadratic gives 2 at interior nodes") {
        const auto l = laplacian(sample(g, [](double x) { return x * x; }));
        for (std::size_t i = 1; i + 1 < g.size(); ++i)
            CHECK(l[i] == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("gaussian: second-order error against (x^2 - 1) e^{-x^2/2}") {
        const auto exact = [](double x) { return (x * x - 1.0) * std::exp(-0.5 * x * x); };
        const auto err = [&](const Grid1D& grid) {
            return max_interior_error(laplacian(sample(grid, [](double x) { return std::exp(-0.5 * x * x); })),
                                      exact);
        };
        const double e1 = err(g);
        const double e2 = err(g.refined(2));
        CHECK(e1 < 1e-3);
        CHECK(std::log2(e1 / e2) >= 1.9);
    }
    SUBCASE("parity: even field gives even laplacian") {
        const auto l = laplacian(sample(g, [](double x) { return std::cos(x) * std::exp(-x * x / 8); }));
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(l[i] - l[g.size() - 1 - i]) < 1e-10);
    }
}

TEST_CASE("normalize") {
    const Grid1D unit(0.0, 1.0, 33);
    const auto one = normalize(sample(unit, [](double) { return 2.0; }));
    for (double v : one.values())
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    const Grid1D g = Grid1D::standard();
    const auto n = normalize(sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
    CHECK(std::abs(integrate(n) - 1.0) < 1e-12);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    CHECK(n[g.center_index()] == doctest::Approx(c).epsilon(1e-10));

    CHECK_THROWS_AS(normalize(ScalarField(unit)), NormalizationError);
}

TEST_CASE("integrate_gradient inverts gradient") {
    const Grid1D g(-5.0, 5.0, 201);
    SUBCASE("linear target gives the quadratic antiderivative") {
        const auto l = integrate_gradient(sample(g, [](double x) { return x; }), g.center_index());
        const double xa = g.node(g.center_index());
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(l[i] == doctest::Approx(0.5 * (g.node(i) * g.node(i) - xa * xa)).epsilon(1e-12));
    }
    SUBCASE("random smooth potentials round-trip exactly") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<std::size_t> anchor(0, g.size() - 1);
        for (int trial = 0; trial < 10; ++trial) {
            const ScalarField phi = random_smooth(g, rng);
            const std::size_t a = anchor(rng);
            const auto back = integrate_gradient(gradient(phi), a);
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK(std::abs(back[i] - (phi[i] - phi[a])) < 1e-11);
        }
    }
}

TEST_CASE("log-cubic interpolation is exact for gaussians") {
    const Grid1D g(-6.0, 6.0, 61);
    const auto f = sample(g, [](double x) { return std::exp(-0.3 * (x - 0.4) * (x - 0.4)); });
    for (double x : {-5.97, -1.234, 0.0, 0.41, 3.3, 5.99})
        CHECK(interpolate_log_cubic(f, x) == doctest::Approx(std::exp(-0.3 * (x - 0.4) * (x - 0.4))).epsilon(1e-12));
    CHECK(interpolate_linear(f, 100.0) == f[g.size() - 1]);
}

TEST_CASE("time derivative stencils") {
    const Grid1D g(0.0, 1.0, 5);
    const TimeGrid tg(0.0, 1.0, 20);
    const auto series = sample_series(g, tg, [](double x, double t) { return (1 + x) * std::sin(2 * t); });
    for (std::size_t k : {0u, 1u, 10u, 19u, 20u}) {
        const double t = tg.time(k);
        const auto d2 = time_derivative(series, k, 2);
        const auto d4 = time_derivative(series, k, 4);
        const double exact = 2.0 * std::cos(2 * t) * 2.0;
        CHECK(std::abs(d2[4] - exact) < 2e-2);
        CHECK(std::abs(d4[4] - exact) < 2e-4);
    }
    FieldSeries bad = series;
    bad[3].set_time(0.9);
    CHECK_THROWS_AS(time_derivative(bad, 1), NumericDomainError);
}
