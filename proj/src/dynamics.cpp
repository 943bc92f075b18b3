#include "sbridge/dynamics.hpp"

#include "sbridge/csv.hpp"
#include "sbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace sbridge {

DriftField::DriftField(std::function<double(double, double)> f) : fn_(std::move(f)) {
    if (!fn_)
        throw NumericDomainError("DriftField: empty evaluator");
}

DriftField::DriftField(FieldSeries series) : series_(std::move(series)) {
    require_uniform_series(series_, 2);
}

DriftField DriftField::zero() {
    return DriftField([](double, double) { return 0.0; });
}

double DriftField::operator()(double x, double t) const {
    if (fn_)
        return fn_(x, t);
    const double t0 = series_.front().time();
    const double dt = series_[1].time() - t0;
    const double pos = std::clamp((t - t0) / dt, 0.0, static_cast<double>(series_.size() - 1));
    const auto k = std::min(static_cast<std::size_t>(pos), series_.size() - 2);
    const double a = pos - static_cast<double>(k);
    return (1.0 - a) * interpolate_linear(series_[k], x) + a * interpolate_linear(series_[k + 1], x);
}

std::size_t PathEnsemble::slice_index(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
            return k;
    std::ostringstream os;
    os << "time " << t << " is not a recorded slice";
    throw NumericDomainError(os.str());
}

std::vector<double> PathEnsemble::slice(std::size_t k) const {
    if (k >= times.size())
        throw NumericDomainError("PathEnsemble::slice: index out of range");
    std::vector<double> out;
    out.reserve(config.n_paths);
    for (std::size_t p = 0; p < config.n_paths; ++p) {
        const double x = at(p, k);
        if (std::isfinite(x))
            out.push_back(x);
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per path: results do not depend on the order paths are run in.
std::mt19937_64 path_stream(std::uint64_t seed, std::size_t path) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(path) + 1)));
}

class InverseCdfSampler {
public:
    explicit InverseCdfSampler(const ScalarField& density) : grid_(density.grid()) {
        for (double v : density.values())
            if (!(v >= 0.0))
                throw NumericDomainError("initial density must be non-negative");
        const ScalarField cdf = cumulative_trapezoid(density);
        const double total = cdf[cdf.size() - 1];
        if (!(total > 0.0))
            throw NormalizationError("initial density has no mass");
        cdf_.assign(cdf.values().begin(), cdf.values().end());
        for (double& c : cdf_)
            c /= total;
    }

    double operator()(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin())
            return grid_.x_min();
        if (it == cdf_.end())
            return grid_.x_max();
        const auto j = static_cast<std::size_t>(it - cdf_.begin()) - 1;
        const double width = cdf_[j + 1] - cdf_[j];
        const double a = width > 0.0 ? (u - cdf_[j]) / width : 0.5;
        return grid_.node(j) + a * grid_.spacing();
    }

private:
    Grid1D grid_;
    std::vector<double> cdf_;
};

double reflect(double x, double lo, double hi) {
    const double width = hi - lo;
    // Fold into [lo, lo + 2 width) and mirror the upper half.
    double y = std::fmod(x - lo, 2.0 * width);
    if (y < 0.0)
        y += 2.0 * width;
    return y <= width ? lo + y : lo + 2.0 * width - y;
}

void validate(const SDEConfig& cfg, double T) {
    if (!(T > 0.0))
        throw NumericDomainError("simulation horizon must be positive");
    if (!(cfg.nu > 0.0))
        throw NumericDomainError("SDEConfig: nu must be positive");
    if (cfg.n_paths == 0)
        throw NumericDomainError("SDEConfig: need at least one path");
    if (!(cfg.dt > 0.0) || cfg.dt > T / 100.0 * (1.0 + 1e-12))
        throw NumericDomainError("SDEConfig: dt must lie in (0, T/100]");
    if (cfg.n_records == 0)
        throw NumericDomainError("SDEConfig: need at least one recording interval");
}

// Shared Euler-Maruyama driver on clock tau in [0, T]; `drift(x, tau)` is already
// expressed on that clock. Slices are stored in clock order.
PathEnsemble euler_maruyama(const std::function<double(double, double)>& drift, const ScalarField& start,
                            const SDEConfig& cfg, double T) {
    validate(cfg, T);
    const auto per_record = static_cast<std::size_t>(std::ceil(T / cfg.dt / static_cast<double>(cfg.n_records) - 1e-9));
    const std::size_t n_steps = per_record * cfg.n_records;
    const double dt = T / static_cast<double>(n_steps);
    const double noise = std::sqrt(2.0 * cfg.nu * dt);
    const double lo = start.grid().x_min();
    const double hi = start.grid().x_max();

    PathEnsemble ens;
    ens.config = cfg;
    ens.T = T;
    for (std::size_t r = 0; r <= cfg.n_records; ++r)
        ens.times.push_back(T * static_cast<double>(r) / static_cast<double>(cfg.n_records));
    const std::size_t n_slices = ens.times.size();
    ens.positions.assign(cfg.n_paths * n_slices, std::numeric_limits<double>::quiet_NaN());

    const InverseCdfSampler sampler(start);
    std::size_t live = 0;
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        auto rng = path_stream(cfg.seed, p);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = sampler(uniform(rng));
        double* row = &ens.positions[p * n_slices];
        row[0] = x;
        bool alive = true;
        for (std::size_t step = 0; step < n_steps && alive; ++step) {
            const double tau = static_cast<double>(step) * dt;
            x += drift(x, tau) * dt + noise * normal(rng);
            if (x < lo || x > hi) {
                if (cfg.boundary == BoundaryPolicy::Reflect)
                    x = reflect(x, lo, hi);
                else
                    alive = false;
            }
            if (alive && (step + 1) % per_record == 0)
                row[(step + 1) / per_record] = x;
        }
        if (alive)
            ++live;
    }
    ens.live_paths = live;
    const double fraction = static_cast<double>(live) / static_cast<double>(cfg.n_paths);
    if (fraction < 0.9) {
        std::ostringstream os;
        os << "boundary leak: only " << fraction * 100.0 << "% of paths stayed inside the grid";
        throw BoundaryLeakError(os.str(), fraction);
    }
    return ens;
}

} // namespace

PathEnsemble simulate_forward(const DriftField& b, const ScalarField& rho0, const SDEConfig& cfg, double T) {
    return euler_maruyama([&b](double x, double t) { return b(x, t); }, rho0, cfg, T);
}

PathEnsemble simulate_backward(const DriftField& b_star, const ScalarField& rhoT, const SDEConfig& cfg, double T) {
    PathEnsemble ens =
        euler_maruyama([&b_star, T](double y, double tau) { return -b_star(y, T - tau); }, rhoT, cfg, T);
    // Clock slice r sits at forward time T - tau_r, so reverse each row.
    const std::size_t n = ens.times.size();
    for (std::size_t p = 0; p < cfg.n_paths; ++p)
        std::reverse(ens.positions.begin() + static_cast<std::ptrdiff_t>(p * n),
                     ens.positions.begin() + static_cast<std::ptrdiff_t>((p + 1) * n));
    return ens;
}

ScalarField empirical_density(const PathEnsemble& ens, std::size_t slice, const Grid1D& grid) {
    const auto w = trapezoid_weights(grid);
    std::vector<double> counts(grid.size(), 0.0);
    double total = 0.0;
    const double h = grid.spacing();
    for (double x : ens.slice(slice)) {
        const double pos = (x - grid.x_min()) / h;
        if (pos < -0.5 || pos > static_cast<double>(grid.size() - 1) + 0.5)
            continue;
        const auto i = static_cast<std::size_t>(std::clamp(std::floor(pos + 0.5), 0.0, static_cast<double>(grid.size() - 1)));
        counts[i] += 1.0;
        total += 1.0;
    }
    if (total == 0.0)
        throw NormalizationError("empirical_density: no samples on the grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
        counts[i] /= total * w[i];
    return ScalarField(grid, std::move(counts), ens.times[slice]);
}

double gaussian_cdf(double x, double mean, double variance) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty())
        throw NumericDomainError("ks_distance: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(static_cast<double>(i) / n - f)});
    }
    return d;
}

double ks_distance(std::span<const double> samples, const ScalarField& density) {
    ScalarField cdf = cumulative_trapezoid(density);
    const double total = cdf[cdf.size() - 1];
    if (!(total > 0.0))
        throw NormalizationError("ks_distance: density has no mass");
    for (double& c : cdf.values())
        c /= total;
    const double lo = density.grid().x_min();
    const double hi = density.grid().x_max();
    return ks_distance(samples, [&](double x) {
        if (x <= lo)
            return 0.0;
        if (x >= hi)
            return 1.0;
        return interpolate_linear(cdf, x);
    });
}

namespace {

void require_matching(const FieldSeries& a, const FieldSeries& b, const char* context) {
    if (a.size() != b.size())
        throw NumericDomainError(std::string(context) + ": series have different slice counts");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!(a[k].grid() == b[k].grid()) || std::abs(a[k].time() - b[k].time()) > 1e-12)
            throw NumericDomainError(std::string(context) + ": series disagree on grid or time labels");
}

bool masked(double density) { return !(std::abs(density) >= kTailMask); }

} // namespace

double fokker_planck_residual(const FieldSeries& rho, const FieldSeries& b, double nu, Direction direction) {
    return fokker_planck_residual(rho, b, [nu](double) { return nu; }, direction);
}

double fokker_planck_residual(const FieldSeries& rho, const FieldSeries& b, const Diffusion& diffusion,
                              Direction direction) {
    require_uniform_series(rho, 3);
    require_matching(rho, b, "fokker_planck_residual");
    const double sign = direction == Direction::Forward ? -1.0 : 1.0;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < rho.size(); ++k) {
        const ScalarField dt = time_derivative(rho, k, 2);
        const ScalarField lap = laplacian(rho[k]);
        const ScalarField flux = gradient(pointwise(b[k], rho[k], [](double x, double y) { return x * y; }));
        const double d = diffusion(rho[k].time());
        for (std::size_t i = 1; i + 1 < rho[k].size(); ++i) {
            if (masked(rho[k][i]))
                continue;
            worst = std::max(worst, std::abs(dt[i] + sign * d * lap[i] + flux[i]));
        }
    }
    return worst;
}

double kolmogorov_backward_residual(const FieldSeries& f, const FieldSeries& b, const Diffusion& diffusion) {
    require_uniform_series(f, 3);
    require_matching(f, b, "kolmogorov_backward_residual");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
        const ScalarField dt = time_derivative(f, k, 2);
        const ScalarField grad = gradient(f[k]);
        const ScalarField lap = laplacian(f[k]);
        const double d = diffusion(f[k].time());
        for (std::size_t i = 1; i + 1 < f[k].size(); ++i) {
            if (masked(f[k][i]))
                continue;
            worst = std::max(worst, std::abs(dt[i] + b[k][i] * grad[i] + d * lap[i]));
        }
    }
    return worst;
}

namespace {

// d_t f + drift grad f + sign nu Laplace f on every slice.
FieldSeries material_derivative(const FieldSeries& f, const FieldSeries& drift, double nu, double sign) {
    FieldSeries out;
    out.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        ScalarField d = time_derivative(f, k, 2);
        const ScalarField grad = gradient(f[k]);
        const ScalarField lap = laplacian(f[k]);
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += drift[k][i] * grad[i] + sign * nu * lap[i];
        d.set_time(f[k].time());
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace

ConditionalDerivatives conditional_derivatives(const BridgeSolution& sol, const FieldSeries& f) {
    require_uniform_series(f, 3);
    require_matching(f, sol.rho, "conditional_derivatives");
    return {material_derivative(f, sol.b, sol.nu, 1.0), material_derivative(f, sol.b_star, sol.nu, -1.0)};
}

AccelerationResidual acceleration_residual(const BridgeSolution& sol, const FieldSeries& force) {
    require_matching(force, sol.rho, "acceleration_residual");
    const FieldSeries fwd = material_derivative(sol.b, sol.b, sol.nu, 1.0);
    const FieldSeries bwd = material_derivative(sol.b_star, sol.b_star, sol.nu, -1.0);
    AccelerationResidual r{0.0, 0.0};
    for (std::size_t k = 1; k + 1 < force.size(); ++k)
        for (std::size_t i = 1; i + 1 < force[k].size(); ++i) {
            if (masked(sol.rho[k][i]))
                continue;
            r.forward = std::max(r.forward, std::abs(fwd[k][i] - force[k][i]));
            r.backward = std::max(r.backward, std::abs(bwd[k][i] - force[k][i]));
        }
    return r;
}

void write_ensemble_csv(const PathEnsemble& ens, std::ostream& out) {
    out << "path_id,t,x\n";
    const std::size_t n = ens.times.size();
    std::vector<std::string> times;
    for (double t : ens.times)
        times.push_back(format_real(t));
    for (std::size_t p = 0; p < ens.config.n_paths; ++p)
        for (std::size_t k = 0; k < n; ++k) {
            const double x = ens.positions[p * n + k];
            if (std::isfinite(x))
                out << p << ',' << times[k] << ',' << format_real(x) << '\n';
        }
}

} // namespace sbridge
