#include "sbridge/burgers.hpp"

#include "sbridge/bridge.hpp"
#include "sbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sbridge {

ScalarField hopf_cole_forward(const ScalarField& theta, double nu) {
    for (double v : theta.values())
        if (!(v > 0.0))
            throw PositivityError("hopf_cole_forward: theta must be strictly positive");
    ScalarField v = gradient(log_field(theta));
    for (double& x : v.values())
        x *= -2.0 * nu;
    return v;
}

ScalarField hopf_cole_inverse(const ScalarField& v, double nu, std::size_t anchor) {
    v.require_finite("hopf_cole_inverse");
    if (!(nu > 0.0))
        throw NumericDomainError("hopf_cole_inverse: nu must be positive");
    ScalarField theta = integrate_gradient(v, anchor);
    for (double& x : theta.values())
        x = std::exp(-x / (2.0 * nu));
    return theta;
}

double burgers_residual(const FieldSeries& v, double nu, const FieldSeries& force, const FieldSeries* density) {
    require_uniform_series(v, 3);
    if (force.size() != v.size() || (density && density->size() != v.size()))
        throw NumericDomainError("burgers_residual: series have different slice counts");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        const ScalarField dt = time_derivative(v, k, 2);
        const ScalarField grad = gradient(v[k]);
        const ScalarField lap = laplacian(v[k]);
        for (std::size_t i = 1; i + 1 < v[k].size(); ++i) {
            if (density && !((*density)[k][i] >= kTailMask))
                continue;
            worst = std::max(worst, std::abs(dt[i] + v[k][i] * grad[i] - nu * lap[i] - force[k][i]));
        }
    }
    return worst;
}

CompatibilityPotential compatibility_potential(const FieldSeries& b, double nu, std::optional<std::size_t> anchor) {
    require_uniform_series(b, 5);
    if (!(nu > 0.0))
        throw NumericDomainError("compatibility_potential: nu must be positive");
    const Grid1D& grid = b.front().grid();
    const std::size_t a = anchor.value_or(grid.center_index());
    if (a >= grid.size())
        throw NumericDomainError("compatibility_potential: anchor outside the grid");

    CompatibilityPotential out{{}, {}, a};
    FieldSeries half;
    for (const ScalarField& bk : b) {
        ScalarField hk = bk;
        for (double& x : hk.values())
            x /= 2.0 * nu;
        ScalarField phi = integrate_gradient(hk, a);
        phi.set_time(bk.time());
        out.phi.push_back(std::move(phi));
        half.push_back(std::move(hk));
    }
    // d_t Phi = integral of d_t b / (2 nu): both maps are linear, and differencing
    // the drift keeps rounding independent of the anchor.
    for (std::size_t k = 0; k < b.size(); ++k) {
        ScalarField c = integrate_gradient(time_derivative(half, k, 4), a);
        const ScalarField db = gradient(b[k]);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] += 0.5 * (b[k][i] * b[k][i] / (2.0 * nu) + db[i]);
        c.set_time(b[k].time());
        out.c.push_back(std::move(c));
    }
    return out;
}

FieldSeries force_from_potential(const FieldSeries& c, double nu) {
    FieldSeries out;
    out.reserve(c.size());
    for (const ScalarField& ck : c) {
        ScalarField f = gradient(ck);
        for (double& x : f.values())
            x *= 2.0 * nu;
        f.set_time(ck.time());
        out.push_back(std::move(f));
    }
    return out;
}

double spatial_spread(const ScalarField& a, const ScalarField& b, const ScalarField* density) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        if (density && !((*density)[i] >= kTailMask))
            continue;
        const double d = a[i] - b[i];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi >= lo ? hi - lo : 0.0;
}

} // namespace sbridge
