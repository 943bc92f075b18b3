#include "sbridge/csv.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/gallery.hpp"
#include "sbridge/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum Exit : int { Ok = 0, CheckFailed = 1, Usage = 2, MissingFile = 3, Numeric = 4, Validation = 5 };

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points;
    std::optional<double> tol;
    std::string kernel;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_tol, bool with_kernel) {
    app->add_option("--config", f.config, "key = value scenario file");
    app->add_option("--out", f.out, "output directory (default: $SBRIDGE_OUT_DIR or ./sbridge-out)");
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--grid-points", f.grid_points, "number of grid nodes");
    if (with_tol)
        app->add_option("--tol", f.tol, "tolerance of the command's main check");
    if (with_kernel)
        app->add_option("--kernel", f.kernel, "kernel tag");
}

const char* tol_key(sbridge::Command c) {
    switch (c) {
    case sbridge::Command::BridgeSolve: return "ipf.tol";
    case sbridge::Command::Simulate: return "sde.ks_tol";
    case sbridge::Command::BurgersResidual: return "burgers.tol";
    case sbridge::Command::KernelCheckCk: return "ck.tol";
    case sbridge::Command::Gallery: return nullptr;
    }
    return nullptr;
}

std::string format_bound(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

int execute(std::optional<sbridge::Command> command, const CommonFlags& f, const std::string& scenario) {
    sbridge::ConfigMap map = f.config.empty() ? sbridge::ConfigMap() : sbridge::ConfigMap::load(f.config);
    if (command)
        map.set("command", std::string(sbridge::command_name(*command)));
    else if (!map.has("command"))
        throw sbridge::ConfigError("run: the config file must set 'command'");
    if (!scenario.empty())
        map.set("scenario", scenario);
    if (f.seed)
        map.set("sde.seed", std::to_string(*f.seed));
    if (f.grid_points)
        map.set("grid.points", std::to_string(*f.grid_points));
    if (!f.kernel.empty())
        map.set("kernel", f.kernel);
    if (!f.out.empty())
        map.set("output.dir", f.out);
    else if (!map.has("output.dir"))
        if (const char* env = std::getenv("SBRIDGE_OUT_DIR"); env && *env)
            map.set("output.dir", env);
    if (f.tol) {
        const char* key = tol_key(sbridge::parse_command(map.entries().at("command")));
        if (!key)
            throw sbridge::ConfigError("--tol is not used by this command");
        map.set(key, sbridge::format_real(*f.tol));
    }

    const sbridge::ScenarioConfig cfg = sbridge::ScenarioConfig::from_map(map);
    const sbridge::RunReport report = sbridge::run(cfg);
    for (const auto& c : report.report.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value;
        if (std::isfinite(c.lower) && std::isfinite(c.upper))
            std::cout << " (expected in [" << format_bound(c.lower) << ", " << format_bound(c.upper) << "])";
        else if (std::isfinite(c.upper))
            std::cout << " (expected <= " << format_bound(c.upper) << ")";
        else
            std::cout << " (expected > " << format_bound(c.lower) << ")";
        std::cout << '\n';
    }
    std::cout << (report.passed() ? "all checks passed" : "some checks failed") << "; report written to "
              << (cfg.out_dir / "report.json").string() << '\n';
    return report.passed() ? Ok : CheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrodinger bridge toolkit: bridges, kernels, diffusions and gallery checks"};
    app.require_subcommand(1);

    CommonFlags run_f, bridge_f, sim_f, burgers_f, ck_f, gallery_f;
    std::string scenario;

    auto* run = app.add_subcommand("run", "run the command named in a config file");
    add_common(run, run_f, true, true);
    run->get_option("--config")->required();
    auto* bridge = app.add_subcommand("bridge-solve", "solve the boundary system and propagate the bridge");
    add_common(bridge, bridge_f, true, true);
    auto* sim = app.add_subcommand("simulate", "Euler-Maruyama path ensemble");
    add_common(sim, sim_f, true, true);
    auto* burgers = app.add_subcommand("burgers-residual", "Burgers equation residual of a backward drift");
    add_common(burgers, burgers_f, true, true);
    auto* ck = app.add_subcommand("kernel-check-ck", "Chapman-Kolmogorov residual of a kernel");
    add_common(ck, ck_f, true, true);
    auto* gallery = app.add_subcommand("gallery", "run a built-in scenario suite");
    add_common(gallery, gallery_f, false, false);
    gallery->add_option("name", scenario, "scenario name")->required();
    auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*list) {
            for (const auto& name : sbridge::gallery::scenario_names())
                std::cout << name << '\n';
            return Ok;
        }
        if (*run)
            return execute(std::nullopt, run_f, "");
        if (*bridge)
            return execute(sbridge::Command::BridgeSolve, bridge_f, "");
        if (*sim)
            return execute(sbridge::Command::Simulate, sim_f, "");
        if (*burgers)
            return execute(sbridge::Command::BurgersResidual, burgers_f, "");
        if (*ck)
            return execute(sbridge::Command::KernelCheckCk, ck_f, "");
        if (*gallery)
            return execute(sbridge::Command::Gallery, gallery_f, scenario);
    } catch (const sbridge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return Usage;
    } catch (const sbridge::MissingFileError& e) {
        std::cerr << "missing file: " << e.what() << '\n';
        return MissingFile;
    } catch (const sbridge::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return Validation;
    } catch (const sbridge::Error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return Numeric;
    }
    return Usage;
}
