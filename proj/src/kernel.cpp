#include "sbridge/kernel.hpp"

#include "feynman_kac_detail.hpp"
#include "sbridge/closed_forms.hpp"
#include "sbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sbridge {

Potential Potential::zero(double nu) {
    return {[](double, double) { return 0.0; }, nu, "zero"};
}

Potential Potential::constant(double lambda, double nu) {
    return {[lambda](double, double) { return lambda; }, nu, "constant"};
}

Potential Potential::quantum_half_omega() {
    return {[](double x, double t) { return gallery::half_omega(x, t); }, 1.0, "quantum-half-omega"};
}

Kernel Kernel::heat(double nu) {
    if (!(nu > 0.0))
        throw NumericDomainError("heat kernel: nu must be positive");
    Kernel k;
    k.kind_ = KernelKind::Heat;
    k.nu_ = nu;
    return k;
}

Kernel Kernel::example1() {
    Kernel k;
    k.kind_ = KernelKind::Example1;
    return k;
}

Kernel Kernel::quantum_k1() {
    Kernel k;
    k.kind_ = KernelKind::QuantumK1;
    return k;
}

Kernel Kernel::pinned_example2() {
    Kernel k;
    k.kind_ = KernelKind::PinnedExample2;
    return k;
}

Kernel Kernel::quantum_k2() {
    Kernel k;
    k.kind_ = KernelKind::QuantumK2;
    return k;
}

Kernel Kernel::markov_family(double label_y, double label_s) {
    Kernel k;
    k.kind_ = KernelKind::MarkovFamily;
    k.label_y_ = label_y;
    k.label_s_ = label_s;
    return k;
}

Kernel Kernel::numeric_fk(Potential potential, Grid1D grid, double mesh_ratio) {
    if (!(potential.nu > 0.0))
        throw NumericDomainError("numeric Feynman-Kac kernel: nu must be positive");
    if (!potential.c)
        throw NumericDomainError("numeric Feynman-Kac kernel: potential has no evaluator");
    if (!(mesh_ratio > 0.0) || mesh_ratio > 10.0)
        throw NumericDomainError("numeric Feynman-Kac kernel: mesh ratio must lie in (0, 10]");
    Kernel k;
    k.kind_ = KernelKind::NumericFK;
    k.nu_ = potential.nu;
    k.mesh_ratio_ = mesh_ratio;
    k.potential_ = std::make_shared<const Potential>(std::move(potential));
    k.grid_ = grid;
    return k;
}

std::string_view Kernel::tag() const noexcept {
    switch (kind_) {
    case KernelKind::Heat: return "heat";
    case KernelKind::Example1: return "example1";
    case KernelKind::QuantumK1: return "quantum-k1";
    case KernelKind::PinnedExample2: return "pinned-example2";
    case KernelKind::QuantumK2: return "quantum-k2";
    case KernelKind::MarkovFamily: return "markov-family";
    case KernelKind::NumericFK: return "numeric-fk";
    }
    return "unknown";
}

bool Kernel::is_stochastic() const noexcept {
    switch (kind_) {
    case KernelKind::Heat:
    case KernelKind::Example1:
    case KernelKind::PinnedExample2:
    case KernelKind::MarkovFamily:
        return true;
    default:
        return false;
    }
}

const Potential& Kernel::potential() const {
    if (!potential_)
        throw NumericDomainError("kernel has no potential (not numeric-fk)");
    return *potential_;
}

const Grid1D& Kernel::fk_grid() const {
    if (!grid_)
        throw NumericDomainError("kernel has no grid (not numeric-fk)");
    return *grid_;
}

std::vector<std::string> kernel_tags() {
    return {"heat", "example1", "quantum-k1", "pinned-example2", "quantum-k2", "markov-family", "numeric-fk"};
}

namespace {

double numeric_fk_point(const Kernel& kernel, double y, double s, double x, double t) {
    const Grid1D& grid = kernel.fk_grid();
    const Potential& pot = kernel.potential();
    const std::size_t steps = default_substeps(pot.nu, grid, s, t, kernel.mesh_ratio());
    const double pos = (y - grid.x_min()) / grid.spacing();
    if (pos < -1e-9 || pos > static_cast<double>(grid.size() - 1) + 1e-9)
        throw NumericDomainError("numeric Feynman-Kac kernel: source point outside grid");
    const double clamped = std::clamp(pos, 0.0, static_cast<double>(grid.size() - 1));
    auto lower = static_cast<std::size_t>(std::floor(clamped));
    double frac = clamped - static_cast<double>(lower);
    if (lower + 1 >= grid.size()) {
        lower = grid.size() - 2;
        frac = 1.0;
    }
    auto at_x = [&](const Eigen::VectorXd& col) {
        ScalarField f(grid, std::vector<double>(col.data(), col.data() + col.size()), t);
        return interpolate_linear(f, x);
    };
    if (frac < 1e-9)
        return at_x(detail::fk_column(pot, grid, lower, s, t, steps));
    if (frac > 1.0 - 1e-9)
        return at_x(detail::fk_column(pot, grid, lower + 1, s, t, steps));
    return (1.0 - frac) * at_x(detail::fk_column(pot, grid, lower, s, t, steps)) +
           frac * at_x(detail::fk_column(pot, grid, lower + 1, s, t, steps));
}

} // namespace

double Kernel::evaluate(double y, double s, double x, double t) const {
    if (!(s < t))
        throw OrderingError("kernel " + std::string(tag()) + ": require s < t (s=" + std::to_string(s) +
                            ", t=" + std::to_string(t) + ")");
    switch (kind_) {
    case KernelKind::Heat: {
        const double d = x - y;
        const double spread = 4.0 * nu_ * (t - s);
        return std::exp(-d * d / spread) / std::sqrt(std::numbers::pi * spread);
    }
    case KernelKind::Example1: return gallery::example1_density(y, s, x, t);
    case KernelKind::QuantumK1: return gallery::quantum_k1(y, s, x, t);
    case KernelKind::PinnedExample2: return gallery::pinned_density(y, s, x, t);
    case KernelKind::QuantumK2: return gallery::quantum_k2(y, s, x, t);
    case KernelKind::MarkovFamily: return gallery::markov_family(label_y_, label_s_, y, s, x, t);
    case KernelKind::NumericFK: return numeric_fk_point(*this, y, s, x, t);
    }
    return 0.0;
}

KernelMatrix kernel_matrix(const Kernel& kernel, const Grid1D& grid, double s, double t) {
    if (!(s < t))
        throw OrderingError("kernel_matrix: require s < t");
    if (!kernel.is_analytic()) {
        if (!(kernel.fk_grid() == grid))
            throw NumericDomainError("kernel_matrix: numeric-fk kernel requested on a different grid");
        const Potential& pot = kernel.potential();
        return solve_feynman_kac(pot, grid, s, t, default_substeps(pot.nu, grid, s, t, kernel.mesh_ratio()));
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            m(i, j) = kernel.evaluate(grid.node(static_cast<std::size_t>(i)), s,
                                      grid.node(static_cast<std::size_t>(j)), t);
    return KernelMatrix{grid, s, t, std::move(m)};
}

namespace {

constexpr std::size_t kMaxRefinement = 64;
constexpr double kRefinementTolerance = 1e-10;

// Integral over the grid's extent of field(z) * weight(z, target_i) for every
// target node, with trapezoid sums refined (field interpolated) until two
// successive levels agree to kRefinementTolerance on the significant targets.
// This keeps the quadrature accurate when the kernel is narrower than h.
template <typename KernelAt>
ScalarField refined_quadrature(const ScalarField& field, double out_time, KernelAt kernel_at) {
    const Grid1D& grid = field.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const bool positive = std::all_of(field.values().begin(), field.values().end(), [](double v) { return v > 0.0; });

    std::vector<double> sums(n, 0.0);
    const auto w = trapezoid_weights(grid);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += w[j] * field[j] * kernel_at(grid.node(j), i);
        sums[i] = acc;
    }

    // Targets whose integrand is still significant at the domain edge carry a
    // truncation error that refinement cannot remove (trapezoid converges at
    // O(h^2) there); they are left out of the convergence test.
    std::vector<char> truncated(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double edge = std::abs(field[0] * kernel_at(grid.node(0), i)) +
                            std::abs(field[n - 1] * kernel_at(grid.node(n - 1), i));
        truncated[i] = h * edge > kRefinementTolerance * std::abs(sums[i]);
    }

    std::vector<double> mids;
    std::vector<double> mid_values;
    for (std::size_t level = 2; level <= kMaxRefinement; level *= 2) {
        const double coarse = h / static_cast<double>(level / 2);
        const std::size_t count = (n - 1) * (level / 2);
        mids.resize(count);
        mid_values.resize(count);
        for (std::size_t m = 0; m < count; ++m) {
            mids[m] = grid.x_min() + (static_cast<double>(m) + 0.5) * coarse;
            mid_values[m] = positive ? interpolate_log_cubic(field, mids[m]) : interpolate_cubic(field, mids[m]);
        }
        std::vector<double> next(n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m < count; ++m)
                acc += mid_values[m] * kernel_at(mids[m], i);
            next[i] = 0.5 * sums[i] + 0.5 * coarse * acc;
            scale = std::max(scale, std::abs(next[i]));
        }
        bool converged = true;
        for (std::size_t i = 0; i < n && converged; ++i) {
            if (std::abs(next[i]) < 1e-12 * scale)
                continue;
            if (truncated[i])
                continue;
            if (std::abs(next[i] - sums[i]) > kRefinementTolerance * std::abs(next[i]))
                converged = false;
        }
        sums.swap(next);
        if (converged)
            break;
    }
    return ScalarField(grid, std::move(sums), out_time);
}

} // namespace

ScalarField propagate_forward(const Kernel& kernel, const ScalarField& f, double t) {
    const double s = f.time();
    if (!(s < t))
        throw OrderingError("propagate_forward: require s < t");
    f.require_finite("propagate_forward");
    const Grid1D& grid = f.grid();
    if (!kernel.is_analytic()) {
        if (!(kernel.fk_grid() == grid))
            throw NumericDomainError("propagate_forward: numeric-fk kernel on a different grid");
        const Potential& pot = kernel.potential();
        Eigen::MatrixXd col(static_cast<Eigen::Index>(grid.size()), 1);
        for (std::size_t i = 0; i < grid.size(); ++i)
            col(static_cast<Eigen::Index>(i), 0) = f[i];
        detail::advance_parabolic(col, pot, grid, s, t, default_substeps(pot.nu, grid, s, t, kernel.mesh_ratio()),
                                  [](double tau) { return tau; });
        return ScalarField(grid, std::vector<double>(col.data(), col.data() + col.size()), t);
    }
    return refined_quadrature(f, t, [&](double y, std::size_t i) { return kernel.evaluate(y, s, grid.node(i), t); });
}

ScalarField propagate_backward(const Kernel& kernel, const ScalarField& g, double s) {
    const double t = g.time();
    if (!(s < t))
        throw OrderingError("propagate_backward: require s < t");
    g.require_finite("propagate_backward");
    const Grid1D& grid = g.grid();
    if (!kernel.is_analytic()) {
        if (!(kernel.fk_grid() == grid))
            throw NumericDomainError("propagate_backward: numeric-fk kernel on a different grid");
        const Potential& pot = kernel.potential();
        Eigen::MatrixXd col(static_cast<Eigen::Index>(grid.size()), 1);
        for (std::size_t i = 0; i < grid.size(); ++i)
            col(static_cast<Eigen::Index>(i), 0) = g[i];
        // Reversed clock: tau = t - s'.
        detail::advance_parabolic(col, pot, grid, 0.0, t - s,
                                  default_substeps(pot.nu, grid, s, t, kernel.mesh_ratio()),
                                  [t](double tau) { return t - tau; });
        return ScalarField(grid, std::vector<double>(col.data(), col.data() + col.size()), s);
    }
    return refined_quadrature(g, s, [&](double x, std::size_t i) { return kernel.evaluate(grid.node(i), s, x, t); });
}

double check_chapman_kolmogorov(const Kernel& kernel, double s, double tau, double t, const Grid1D& grid) {
    if (!(s < tau && tau < t))
        throw OrderingError("check_chapman_kolmogorov: require s < tau < t");
    std::vector<std::size_t> probe;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.in_probe_window(i))
            probe.push_back(i);
    const auto p = static_cast<Eigen::Index>(probe.size());
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto w = trapezoid_weights(grid);

    Eigen::MatrixXd first(p, n);
    Eigen::MatrixXd second(n, p);
    Eigen::MatrixXd direct(p, p);
    if (kernel.is_analytic()) {
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index z = 0; z < n; ++z)
                first(a, z) = kernel.evaluate(grid.node(probe[static_cast<std::size_t>(a)]), s,
                                              grid.node(static_cast<std::size_t>(z)), tau) *
                              w[static_cast<std::size_t>(z)];
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index z = 0; z < n; ++z)
                second(z, b) = kernel.evaluate(grid.node(static_cast<std::size_t>(z)), tau,
                                               grid.node(probe[static_cast<std::size_t>(b)]), t);
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index a = 0; a < p; ++a)
                direct(a, b) = kernel.evaluate(grid.node(probe[static_cast<std::size_t>(a)]), s,
                                               grid.node(probe[static_cast<std::size_t>(b)]), t);
    } else {
        const KernelMatrix k1 = kernel_matrix(kernel, grid, s, tau);
        const KernelMatrix k2 = kernel_matrix(kernel, grid, tau, t);
        const KernelMatrix k12 = kernel_matrix(kernel, grid, s, t);
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index z = 0; z < n; ++z)
                first(a, z) = k1.entries(static_cast<Eigen::Index>(probe[static_cast<std::size_t>(a)]), z) *
                              w[static_cast<std::size_t>(z)];
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index z = 0; z < n; ++z)
                second(z, b) = k2.entries(z, static_cast<Eigen::Index>(probe[static_cast<std::size_t>(b)]));
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index a = 0; a < p; ++a)
                direct(a, b) = k12.entries(static_cast<Eigen::Index>(probe[static_cast<std::size_t>(a)]),
                                           static_cast<Eigen::Index>(probe[static_cast<std::size_t>(b)]));
    }
    const Eigen::MatrixXd composed = first * second;
    return (composed - direct).cwiseAbs().maxCoeff();
}

std::vector<double> default_limit_steps() { return {1e-2, 5e-3, 2.5e-3}; }

double extrapolate_to_zero(std::span<const double> steps, std::span<const double> values) {
    if (steps.size() != values.size() || steps.empty())
        throw NumericDomainError("extrapolate_to_zero: need matching non-empty samples");
    std::vector<double> p(values.begin(), values.end());
    const std::size_t m = p.size();
    // Neville's scheme evaluated at h = 0.
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = 0; i + level < m; ++i) {
            const double hi = steps[i];
            const double hj = steps[i + level];
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    return p[0];
}

namespace {

struct LocalMoments {
    double mass;
    double leak;
    double first;
    double second;
};

// Moments of x -> k(y, t, x, t + dt) about y.
LocalMoments local_moments(const Kernel& kernel, double y, double t, double dt, double epsilon) {
    LocalMoments m{0.0, 0.0, 0.0, 0.0};
    auto accumulate = [&](double x, double weight, double value) {
        const double d = x - y;
        m.mass += weight * value;
        if (std::abs(d) > epsilon)
            m.leak += weight * value;
        m.first += weight * d * value;
        m.second += weight * d * d * value;
    };
    if (kernel.is_analytic()) {
        const Grid1D local(y - 10.0, y + 10.0, 20001);
        const auto w = trapezoid_weights(local);
        for (std::size_t i = 0; i < local.size(); ++i)
            accumulate(local.node(i), w[i], kernel.evaluate(y, t, local.node(i), t + dt));
        return m;
    }
    const Grid1D& grid = kernel.fk_grid();
    const double pos = std::round((y - grid.x_min()) / grid.spacing());
    if (pos < 0.0 || pos > static_cast<double>(grid.size() - 1))
        throw NumericDomainError("short_time_moments: source point outside the numeric kernel grid");
    const auto node = static_cast<std::size_t>(pos);
    const Potential& pot = kernel.potential();
    const Eigen::VectorXd col =
        detail::fk_column(pot, grid, node, t, t + dt, default_substeps(pot.nu, grid, t, t + dt, kernel.mesh_ratio()));
    const auto w = trapezoid_weights(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        accumulate(grid.node(i), w[i], col(static_cast<Eigen::Index>(i)));
    return m;
}

bool monotone(std::span<const double> v) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double d = v[i] - v[i - 1];
        const double tie = 1e-12 * std::max({1.0, std::abs(v[i]), std::abs(v[i - 1])});
        if (d > tie)
            down = false;
        if (d < -tie)
            up = false;
    }
    return up || down;
}

std::vector<double> resolve_steps(std::span<const double> dts) {
    std::vector<double> steps = dts.empty() ? default_limit_steps() : std::vector<double>(dts.begin(), dts.end());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0))
            throw NumericDomainError("limit steps must be positive");
        if (i > 0 && !(steps[i] < steps[i - 1]))
            throw NumericDomainError("limit steps must decrease");
    }
    return steps;
}

} // namespace

MomentRates short_time_moments(const Kernel& kernel, double y, double t, std::span<const double> dts,
                               double epsilon) {
    const auto steps = resolve_steps(dts);
    MomentRates out;
    std::vector<double> leak, first, second;
    for (double dt : steps) {
        const LocalMoments m = local_moments(kernel, y, t, dt, epsilon);
        out.table.push_back({dt, m.leak / dt, m.first / dt, m.second / dt});
        leak.push_back(m.leak / dt);
        first.push_back(m.first / dt);
        second.push_back(m.second / dt);
    }
    out.leak_rate = extrapolate_to_zero(steps, leak);
    out.first_moment_rate = extrapolate_to_zero(steps, first);
    out.second_moment_rate = extrapolate_to_zero(steps, second);
    if (!monotone(leak) || !monotone(first) || !monotone(second))
        out.warning = "non-monotone short-time rates; extrapolated limits may be unreliable";
    return out;
}

double extract_forward_drift(const Kernel& kernel, double x, double t, std::span<const double> dts) {
    const auto steps = resolve_steps(dts);
    std::vector<double> rates;
    for (double dt : steps) {
        const LocalMoments m = local_moments(kernel, x, t, dt, 1.0);
        if (!(m.mass > 0.0))
            throw NumericDomainError("extract_forward_drift: kernel has no mass near the source point");
        rates.push_back(m.first / m.mass / dt);
    }
    return extrapolate_to_zero(steps, rates);
}

} // namespace sbridge
