#include "sbridge/scenario.hpp"

#include "sbridge/bridge.hpp"
#include "sbridge/burgers.hpp"
#include "sbridge/csv.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace sbridge {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string where(const ConfigMap& map, const std::string& key) {
    const int line = map.line(key);
    if (line == 0)
        return "option '" + key + "'";
    return map.source() + ":" + std::to_string(line) + " ('" + key + "')";
}

double to_real(const ConfigMap& map, const std::string& key) {
    try {
        return parse_real(map.entries().at(key));
    } catch (const ValidationError&) {
        throw ConfigError(where(map, key) + ": expected a real number, got '" + map.entries().at(key) + "'",
                          static_cast<std::size_t>(map.line(key)));
    }
}

std::uint64_t to_unsigned(const ConfigMap& map, const std::string& key) {
    const std::string& text = map.entries().at(key);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(where(map, key) + ": expected a non-negative integer, got '" + text + "'",
                          static_cast<std::size_t>(map.line(key)));
    return value;
}

std::string one_of(const ConfigMap& map, const std::string& key, std::initializer_list<std::string_view> allowed) {
    const std::string& text = map.entries().at(key);
    for (auto a : allowed)
        if (text == a)
            return text;
    std::string list;
    for (auto a : allowed)
        list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(where(map, key) + ": '" + text + "' is not one of " + list,
                      static_cast<std::size_t>(map.line(key)));
}

void require(bool ok, const ConfigMap& map, const std::string& key, const std::string& what) {
    if (!ok)
        throw ValidationError(where(map, key) + ": " + what);
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "command",     "scenario",     "kernel",        "kernel.label_y", "kernel.label_s", "kernel.potential",
        "kernel.lambda", "nu",         "grid.x_min",    "grid.x_max",     "grid.points",    "time.T",
        "time.steps",  "rho0",         "rhoT",          "ipf.tol",        "ipf.max_iter",   "sde.drift",
        "sde.direction", "sde.paths",  "sde.dt",        "sde.seed",       "sde.boundary",   "sde.records",
        "sde.ks_tol",  "burgers.velocity", "burgers.tol", "ck.s",         "ck.tau",         "ck.t",
        "ck.tol",      "output.dir"};
    return keys;
}

// Shortest representation that round-trips.
std::string format_compact(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

// ---- pipelines -------------------------------------------------------------

struct Pipeline {
    const ScenarioConfig& cfg;
    RunReport& out;

    std::filesystem::path artifact(const std::string& name) {
        const auto p = cfg.out_dir / name;
        out.artifacts.push_back(p);
        return p;
    }

    std::ofstream open(const std::string& name) {
        std::ofstream f(artifact(name));
        if (!f)
            throw MissingFileError("cannot write " + (cfg.out_dir / name).string());
        return f;
    }

    void add(gallery::CheckResult c) { out.report.add(std::move(c)); }
};

BridgeSolution solve_bridge(const ScenarioConfig& cfg, Pipeline& p) {
    const Grid1D grid = cfg.grid();
    const Kernel kernel = cfg.make_kernel();
    const BoundaryData bd(cfg.rho0.realize(grid, 0.0), cfg.rhoT.realize(grid, cfg.T), cfg.T);
    const KernelMatrix K = kernel_matrix(kernel, grid, 0.0, cfg.T);
    const BridgeFactors f = solve_boundary_system(K, bd, IpfOptions{cfg.ipf_tol, cfg.ipf_max_iter});
    const auto [m0, mT] = bridge_marginals(K, f);
    p.add(gallery::CheckResult::at_most("IPF final residual", f.residual_history.back(), cfg.ipf_tol));
    p.add(gallery::CheckResult::at_most("time-0 marginal L1 error", l1_distance(m0, bd.rho0), 1e-10));
    p.add(gallery::CheckResult::at_most("time-T marginal L1 error", l1_distance(mT, bd.rhoT), 1e-10));
    p.add(gallery::CheckResult::within("IPF sweeps", static_cast<double>(f.iterations), 1.0,
                                       static_cast<double>(cfg.ipf_max_iter)));
    {
        auto os = p.open("factors.csv");
        os << "x,u0,vT\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << format_real(grid.node(i)) << ',' << format_real(f.u0[i]) << ',' << format_real(f.vT[i]) << '\n';
    }
    BridgeSolution sol = propagate_factors(f, kernel, cfg.lattice());
    double drift = 0.0;
    for (const auto& r : sol.rho)
        drift = std::max(drift, std::abs(integrate(r) - 1.0));
    p.add(gallery::CheckResult::at_most("density mass drift over the lattice", drift, 1e-4));
    auto os = p.open("fields.csv");
    write_fields_csv(os, {{"u", &sol.u}, {"v", &sol.v}, {"rho", &sol.rho}, {"b", &sol.b}, {"b_star", &sol.b_star}});
    return sol;
}

void run_bridge_solve(const ScenarioConfig& cfg, Pipeline& p) { solve_bridge(cfg, p); }

void run_simulate(const ScenarioConfig& cfg, Pipeline& p) {
    const bool forward = cfg.direction == "forward";
    const Grid1D grid = cfg.grid();
    SDEConfig sde;
    sde.nu = cfg.nu;
    sde.n_paths = cfg.sde_paths;
    sde.dt = cfg.sde_dt;
    sde.seed = cfg.seed;
    sde.boundary = cfg.boundary == "absorb" ? BoundaryPolicy::Absorb : BoundaryPolicy::Reflect;
    sde.n_records = cfg.sde_records;

    // Reference density at time t, if one is known.
    std::function<double(double, double)> reference_cdf;
    std::optional<BridgeSolution> bridge;
    DriftField drift = DriftField::zero();
    if (cfg.drift == "packet") {
        drift = DriftField(forward ? std::function<double(double, double)>(gallery::forward_drift)
                                   : std::function<double(double, double)>(gallery::backward_drift));
        if (cfg.rho0.kind == DensitySpec::Kind::Packet && cfg.rhoT.kind == DensitySpec::Kind::Packet)
            reference_cdf = [](double x, double t) { return gaussian_cdf(x, 0.0, 1.0 + t * t); };
    } else if (cfg.drift == "bridge") {
        bridge = solve_bridge(cfg, p);
        drift = DriftField(forward ? bridge->b : bridge->b_star);
    } else {
        const DensitySpec& start = forward ? cfg.rho0 : cfg.rhoT;
        if (start.kind != DensitySpec::Kind::Csv) {
            const double mean = start.kind == DensitySpec::Kind::Gaussian ? start.mean : 0.0;
            const double var0 = start.kind == DensitySpec::Kind::Gaussian ? start.variance
                                                                           : 1.0 + (forward ? 0.0 : cfg.T * cfg.T);
            const double nu = cfg.nu;
            const double T = cfg.T;
            reference_cdf = [=](double x, double t) {
                return gaussian_cdf(x, mean, var0 + 2.0 * nu * (forward ? t : T - t));
            };
        }
    }

    const PathEnsemble ens = forward ? simulate_forward(drift, cfg.rho0.realize(grid, 0.0), sde, cfg.T)
                                     : simulate_backward(drift, cfg.rhoT.realize(grid, cfg.T), sde, cfg.T);
    {
        auto os = p.open("paths.csv");
        write_ensemble_csv(ens, os);
    }
    p.add(gallery::CheckResult::within("surviving path fraction",
                                       static_cast<double>(ens.live_paths) / static_cast<double>(sde.n_paths), 0.9,
                                       1.0));
    // The start slice is the sampled initial density; compare the others.
    for (std::size_t k = 0; k < ens.n_slices(); ++k) {
        const double t = ens.times[k];
        if ((forward && k == 0) || (!forward && k + 1 == ens.n_slices()))
            continue;
        const std::vector<double> xs = ens.slice(k);
        double ks = 0.0;
        if (reference_cdf) {
            ks = ks_distance(xs, [&](double x) { return reference_cdf(x, t); });
        } else if (bridge) {
            ks = ks_distance(xs, bridge->rho.at(bridge->slice_index(t)));
        } else {
            continue;
        }
        p.add(gallery::CheckResult::at_most("KS distance at t = " + format_compact(t), ks, cfg.ks_tol));
    }
}

void run_burgers(const ScenarioConfig& cfg, Pipeline& p) {
    const Grid1D grid = cfg.grid();
    const TimeGrid lattice = cfg.lattice();
    if (cfg.velocity == "packet") {
        const auto force = [](double x, double t) { return 2.0 * gallery::half_omega_gradient(x, t); };
        const auto residual = [&](const Grid1D& g, const TimeGrid& l) {
            const FieldSeries rho = sample_series(g, l, gallery::rho);
            return burgers_residual(sample_series(g, l, gallery::backward_drift), 1.0, sample_series(g, l, force),
                                    &rho);
        };
        p.add(gallery::CheckResult::at_most("Burgers residual", residual(grid, lattice), cfg.burgers_tol));
        p.add(gallery::CheckResult::within("Burgers residual refinement ratio",
                                           gallery::refinement_ratio(residual, grid, lattice), 3.5, 4.5));
        const FieldSeries v = sample_series(grid, lattice, gallery::backward_drift);
        const FieldSeries f = sample_series(grid, lattice, force);
        auto os = p.open("burgers.csv");
        write_fields_csv(os, {{"velocity", &v}, {"force", &f}});
        return;
    }
    const Kernel kernel = cfg.make_kernel();
    if (kernel.kind() != KernelKind::Heat && kernel.kind() != KernelKind::NumericFK)
        throw ValidationError("burgers-residual with velocity = bridge needs kernel heat or numeric-fk");
    const BridgeSolution sol = solve_bridge(cfg, p);
    FieldSeries force;
    for (const auto& b : sol.b_star) {
        ScalarField c(b.grid(), b.time());
        if (kernel.kind() == KernelKind::NumericFK)
            c = sample(b.grid(), kernel.potential().c, b.time());
        ScalarField F = gradient(c);
        for (double& x : F.values())
            x *= 2.0 * sol.nu;
        F.set_time(b.time());
        force.push_back(std::move(F));
    }
    // The tail mask uses the bridge density at each node.
    p.add(gallery::CheckResult::at_most("Burgers residual of b*", burgers_residual(sol.b_star, sol.nu, force, &sol.rho),
                                        cfg.burgers_tol));
    auto os = p.open("burgers.csv");
    write_fields_csv(os, {{"velocity", &sol.b_star}, {"force", &force}});
}

void run_ck(const ScenarioConfig& cfg, Pipeline& p) {
    const double r = check_chapman_kolmogorov(cfg.make_kernel(), cfg.ck_s, cfg.ck_tau, cfg.ck_t, cfg.grid());
    p.add(gallery::CheckResult::at_most("Chapman-Kolmogorov residual [" + cfg.kernel + "]", r, cfg.ck_tol));
}

void run_gallery(const ScenarioConfig& cfg, Pipeline& p) {
    const Grid1D grid = cfg.grid();
    const TimeGrid lattice = cfg.lattice();
    p.out.report = gallery::run_scenario(cfg.scenario, grid, lattice);
    const FieldSeries rho = sample_series(grid, lattice, gallery::rho);
    const FieldSeries th = sample_series(grid, lattice, gallery::theta);
    const FieldSeries ts = sample_series(grid, lattice, gallery::theta_star);
    const FieldSeries b = sample_series(grid, lattice, gallery::forward_drift);
    const FieldSeries bs = sample_series(grid, lattice, gallery::backward_drift);
    const FieldSeries w = sample_series(grid, lattice, gallery::half_omega);
    auto os = p.open("packet_fields.csv");
    write_fields_csv(os, {{"rho", &rho}, {"theta", &th}, {"theta_star", &ts}, {"b", &b}, {"b_star", &bs},
                          {"half_omega", &w}});
}

} // namespace

// ---- ConfigMap ---------------------------------------------------------------

ConfigMap ConfigMap::parse(std::string_view text, std::string_view source) {
    ConfigMap map;
    map.source_ = std::string(source);
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string at = map.source_ + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            throw ConfigError(at + ": expected 'key = value'", static_cast<std::size_t>(line_no));
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(at + ": empty key or value", static_cast<std::size_t>(line_no));
        if (map.values_.count(key))
            throw ConfigError(at + ": duplicate key '" + key + "' (first on line " + std::to_string(map.lines_[key]) +
                                  ")",
                              static_cast<std::size_t>(line_no));
        map.values_[key] = value;
        map.lines_[key] = line_no;
    }
    return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFileError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    ConfigMap map = parse(text.str(), path.string());
    map.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return map;
}

void ConfigMap::set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
    lines_[key] = 0;
}

int ConfigMap::line(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

// ---- DensitySpec -------------------------------------------------------------

DensitySpec DensitySpec::parse(std::string_view text, const std::filesystem::path& base_dir) {
    DensitySpec d;
    const std::string s = trim(text);
    if (s == "packet")
        return d;
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw ConfigError("density '" + s + "': expected packet, gaussian(mean, variance) or csv(path)");
    const std::string name = trim(std::string_view(s).substr(0, open));
    const std::string args = s.substr(open + 1, s.size() - open - 2);
    if (name == "gaussian") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("density '" + s + "': gaussian needs mean and variance");
        try {
            d.mean = parse_real(trim(std::string_view(args).substr(0, comma)));
            d.variance = parse_real(trim(std::string_view(args).substr(comma + 1)));
        } catch (const ValidationError&) {
            throw ConfigError("density '" + s + "': gaussian arguments must be real numbers");
        }
        if (!(d.variance > 0.0))
            throw ValidationError("density '" + s + "': variance must be positive");
        d.kind = Kind::Gaussian;
        return d;
    }
    if (name == "csv") {
        d.kind = Kind::Csv;
        d.path = trim(args);
        if (d.path.empty())
            throw ConfigError("density '" + s + "': empty path");
        if (d.path.is_relative())
            d.path = base_dir / d.path;
        return d;
    }
    throw ConfigError("density '" + s + "': unknown form '" + name + "'");
}

ScalarField DensitySpec::realize(const Grid1D& grid, double t) const {
    switch (kind) {
    case Kind::Packet: return sample(grid, gallery::rho, t);
    case Kind::Gaussian: {
        ScalarField f = sample(grid, [this](double x) { return gallery::gaussian(x, mean, variance); }, t);
        f.set_time(t);
        return f;
    }
    case Kind::Csv: {
        ScalarField f = read_density_csv(path, grid);
        f.set_time(t);
        return f;
    }
    }
    return ScalarField(grid, t);
}

std::string DensitySpec::describe() const {
    switch (kind) {
    case Kind::Packet: return "packet";
    case Kind::Gaussian: return "gaussian(" + format_compact(mean) + ", " + format_compact(variance) + ")";
    case Kind::Csv: return "csv(" + path.string() + ")";
    }
    return {};
}

// ---- commands ----------------------------------------------------------------

std::string_view command_name(Command c) {
    switch (c) {
    case Command::BridgeSolve: return "bridge-solve";
    case Command::Simulate: return "simulate";
    case Command::BurgersResidual: return "burgers-residual";
    case Command::KernelCheckCk: return "kernel-check-ck";
    case Command::Gallery: return "gallery";
    }
    return "unknown";
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::BridgeSolve, Command::Simulate, Command::BurgersResidual, Command::KernelCheckCk,
                      Command::Gallery})
        if (command_name(c) == name)
            return c;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::vector<std::string> config_keys() { return known_keys(); }

ScenarioConfig ScenarioConfig::from_map(const ConfigMap& map) {
    ScenarioConfig c;
    const auto& keys = known_keys();
    for (const auto& [key, value] : map.entries())
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(where(map, key) + ": unknown key", static_cast<std::size_t>(map.line(key)));
    const auto has = [&](const char* k) { return map.has(k); };
    const auto text = [&](const char* k) { return map.entries().at(k); };

    if (has("command")) {
        try {
            c.command = parse_command(text("command"));
        } catch (const ConfigError& e) {
            throw ConfigError(where(map, "command") + ": " + e.what(), static_cast<std::size_t>(map.line("command")));
        }
    }
    if (has("scenario")) {
        const auto names = gallery::scenario_names();
        c.scenario = text("scenario");
        if (std::find(names.begin(), names.end(), c.scenario) == names.end())
            throw ConfigError(where(map, "scenario") + ": unknown scenario '" + c.scenario + "'",
                              static_cast<std::size_t>(map.line("scenario")));
    }
    if (has("kernel")) {
        const auto tags = kernel_tags();
        c.kernel = text("kernel");
        if (std::find(tags.begin(), tags.end(), c.kernel) == tags.end())
            throw ConfigError(where(map, "kernel") + ": unknown kernel '" + c.kernel + "'",
                              static_cast<std::size_t>(map.line("kernel")));
    }
    if (has("kernel.label_y"))
        c.label_y = to_real(map, "kernel.label_y");
    if (has("kernel.label_s"))
        c.label_s = to_real(map, "kernel.label_s");
    if (has("kernel.potential"))
        c.potential = one_of(map, "kernel.potential", {"zero", "constant", "quantum"});
    if (has("kernel.lambda"))
        c.potential_lambda = to_real(map, "kernel.lambda");
    if (has("nu"))
        c.nu = to_real(map, "nu");
    if (has("grid.x_min"))
        c.x_min = to_real(map, "grid.x_min");
    if (has("grid.x_max"))
        c.x_max = to_real(map, "grid.x_max");
    if (has("grid.points"))
        c.grid_points = to_unsigned(map, "grid.points");
    if (has("time.T"))
        c.T = to_real(map, "time.T");
    if (has("time.steps"))
        c.time_steps = to_unsigned(map, "time.steps");
    if (has("rho0")) {
        try {
            c.rho0 = DensitySpec::parse(text("rho0"), map.base_dir());
        } catch (const ConfigError& e) {
            throw ConfigError(where(map, "rho0") + ": " + e.what(), static_cast<std::size_t>(map.line("rho0")));
        }
    }
    if (has("rhoT")) {
        try {
            c.rhoT = DensitySpec::parse(text("rhoT"), map.base_dir());
        } catch (const ConfigError& e) {
            throw ConfigError(where(map, "rhoT") + ": " + e.what(), static_cast<std::size_t>(map.line("rhoT")));
        }
    }
    if (has("ipf.tol"))
        c.ipf_tol = to_real(map, "ipf.tol");
    if (has("ipf.max_iter"))
        c.ipf_max_iter = to_unsigned(map, "ipf.max_iter");
    if (has("sde.drift"))
        c.drift = one_of(map, "sde.drift", {"packet", "bridge", "zero"});
    if (has("sde.direction"))
        c.direction = one_of(map, "sde.direction", {"forward", "backward"});
    if (has("sde.paths"))
        c.sde_paths = to_unsigned(map, "sde.paths");
    if (has("sde.dt"))
        c.sde_dt = to_real(map, "sde.dt");
    if (has("sde.seed"))
        c.seed = to_unsigned(map, "sde.seed");
    if (has("sde.boundary"))
        c.boundary = one_of(map, "sde.boundary", {"reflect", "absorb"});
    if (has("sde.records"))
        c.sde_records = to_unsigned(map, "sde.records");
    if (has("sde.ks_tol"))
        c.ks_tol = to_real(map, "sde.ks_tol");
    if (has("burgers.velocity"))
        c.velocity = one_of(map, "burgers.velocity", {"packet", "bridge"});
    if (has("burgers.tol"))
        c.burgers_tol = to_real(map, "burgers.tol");
    if (has("ck.s"))
        c.ck_s = to_real(map, "ck.s");
    if (has("ck.tau"))
        c.ck_tau = to_real(map, "ck.tau");
    if (has("ck.t"))
        c.ck_t = to_real(map, "ck.t");
    if (has("ck.tol"))
        c.ck_tol = to_real(map, "ck.tol");
    if (has("output.dir")) {
        c.out_dir = text("output.dir");
        if (c.out_dir.is_relative() && map.line("output.dir") != 0)
            c.out_dir = map.base_dir() / c.out_dir;
    }

    const auto key_or = [&](const char* k, const char* fallback) { return map.has(k) ? k : fallback; };
    require(c.nu > 0.0, map, key_or("nu", "nu"), "nu must be positive");
    require(c.x_min < c.x_max, map, key_or("grid.x_max", "grid.x_min"), "grid.x_min must be below grid.x_max");
    require(c.grid_points >= 5 && c.grid_points <= 20001, map, "grid.points", "grid.points must lie in [5, 20001]");
    require(c.T > 0.0, map, "time.T", "time.T must be positive");
    require(c.time_steps >= 4, map, "time.steps", "time.steps must be at least 4");
    require(c.ipf_tol > 0.0 && c.ipf_max_iter >= 1, map, key_or("ipf.tol", "ipf.max_iter"),
            "ipf.tol must be positive and ipf.max_iter at least 1");
    require(c.sde_paths >= 1, map, "sde.paths", "sde.paths must be at least 1");
    require(c.sde_dt > 0.0, map, "sde.dt", "sde.dt must be positive");
    require(c.sde_records >= 1, map, "sde.records", "sde.records must be at least 1");
    require(c.ks_tol > 0.0 && c.burgers_tol > 0.0 && c.ck_tol > 0.0, map, "ck.tol", "tolerances must be positive");
    require(c.ck_s < c.ck_tau && c.ck_tau < c.ck_t, map, "ck.tau", "require ck.s < ck.tau < ck.t");
    require(c.potential_lambda >= 0.0, map, "kernel.lambda", "kernel.lambda must be non-negative");
    if (c.command == Command::Simulate && c.drift == "bridge")
        require(c.time_steps % c.sde_records == 0, map, "sde.records",
                "with sde.drift = bridge, time.steps must be a multiple of sde.records");
    return c;
}

Kernel ScenarioConfig::make_kernel() const {
    if (kernel == "heat")
        return Kernel::heat(nu);
    if (kernel == "example1")
        return Kernel::example1();
    if (kernel == "quantum-k1")
        return Kernel::quantum_k1();
    if (kernel == "pinned-example2")
        return Kernel::pinned_example2();
    if (kernel == "quantum-k2")
        return Kernel::quantum_k2();
    if (kernel == "markov-family")
        return Kernel::markov_family(label_y, label_s);
    Potential pot = potential == "quantum"    ? Potential::quantum_half_omega()
                    : potential == "constant" ? Potential::constant(potential_lambda, nu)
                                              : Potential::zero(nu);
    return Kernel::numeric_fk(std::move(pot), grid());
}

std::map<std::string, std::string> ScenarioConfig::echo() const {
    return {{"command", std::string(command_name(command))},
            {"scenario", scenario},
            {"kernel", kernel},
            {"kernel.label_y", format_compact(label_y)},
            {"kernel.label_s", format_compact(label_s)},
            {"kernel.potential", potential},
            {"kernel.lambda", format_compact(potential_lambda)},
            {"nu", format_compact(nu)},
            {"grid.x_min", format_compact(x_min)},
            {"grid.x_max", format_compact(x_max)},
            {"grid.points", std::to_string(grid_points)},
            {"time.T", format_compact(T)},
            {"time.steps", std::to_string(time_steps)},
            {"rho0", rho0.describe()},
            {"rhoT", rhoT.describe()},
            {"ipf.tol", format_compact(ipf_tol)},
            {"ipf.max_iter", std::to_string(ipf_max_iter)},
            {"sde.drift", drift},
            {"sde.direction", direction},
            {"sde.paths", std::to_string(sde_paths)},
            {"sde.dt", format_compact(sde_dt)},
            {"sde.seed", std::to_string(seed)},
            {"sde.boundary", boundary},
            {"sde.records", std::to_string(sde_records)},
            {"sde.ks_tol", format_compact(ks_tol)},
            {"burgers.velocity", velocity},
            {"burgers.tol", format_compact(burgers_tol)},
            {"ck.s", format_compact(ck_s)},
            {"ck.tau", format_compact(ck_tau)},
            {"ck.t", format_compact(ck_t)},
            {"ck.tol", format_compact(ck_tol)},
            {"output.dir", out_dir.string()}};
}

// ---- running -----------------------------------------------------------------

std::string RunReport::to_json() const {
    using nlohmann::ordered_json;
    const auto bound = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    ordered_json j;
    j["command"] = command;
    j["scenario"] = report.scenario;
    j["passed"] = passed();
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name},
                               {"value", std::isfinite(c.value) ? ordered_json(c.value) : ordered_json(nullptr)},
                               {"lower", bound(c.lower)},
                               {"upper", bound(c.upper)},
                               {"pass", c.pass}});
    j["config"] = ordered_json::object();
    for (const auto& [k, v] : config)
        j["config"][k] = v;
    j["artifacts"] = ordered_json::array();
    for (const auto& a : artifacts)
        j["artifacts"].push_back(a.filename().string());
    return j.dump(2) + "\n";
}

RunReport run(const ScenarioConfig& config) {
    RunReport out;
    out.command = std::string(command_name(config.command));
    out.config = config.echo();
    out.report.scenario = config.command == Command::Gallery ? config.scenario : out.command;
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec)
        throw MissingFileError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

    Pipeline p{config, out};
    switch (config.command) {
    case Command::BridgeSolve: run_bridge_solve(config, p); break;
    case Command::Simulate: run_simulate(config, p); break;
    case Command::BurgersResidual: run_burgers(config, p); break;
    case Command::KernelCheckCk: run_ck(config, p); break;
    case Command::Gallery: run_gallery(config, p); break;
    }
    const auto report_path = config.out_dir / "report.json";
    out.artifacts.push_back(report_path);
    std::ofstream f(report_path);
    if (!f)
        throw MissingFileError("cannot write " + report_path.string());
    f << out.to_json();
    return out;
}

} // namespace sbridge
