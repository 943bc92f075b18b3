#pragma once

#include "sbridge/gallery.hpp"
#include "sbridge/kernel.hpp"
#include "sbridge/numgrid.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbridge {

/// Raw key = value pairs in file order; keys are unique.
class ConfigMap {
public:
    /// Lines are "key = value"; '#' starts a comment; blank lines are ignored.
    /// Throws ConfigError naming the line for malformed or duplicate entries.
    static ConfigMap parse(std::string_view text, std::string_view source = "<config>");
    /// Throws MissingFileError if the file cannot be read.
    static ConfigMap load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const noexcept { return values_; }
    /// Directory relative paths are resolved against.
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
    const std::string& source() const noexcept { return source_; }
    /// Source line of a key, 0 for entries added by set().
    int line(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::filesystem::path base_dir_ = ".";
    std::string source_ = "<config>";
};

/// Boundary density: "packet", "gaussian(mean, variance)" or "csv(path)".
struct DensitySpec {
    enum class Kind { Packet, Gaussian, Csv } kind = Kind::Packet;
    double mean = 0.0;
    double variance = 1.0;
    std::filesystem::path path;

    static DensitySpec parse(std::string_view text, const std::filesystem::path& base_dir);
    /// Packet densities are rho(., t) of the free packet.
    ScalarField realize(const Grid1D& grid, double t) const;
    std::string describe() const;
};

enum class Command { BridgeSolve, Simulate, BurgersResidual, KernelCheckCk, Gallery };

std::string_view command_name(Command c);
/// Throws ConfigError for unknown names.
Command parse_command(std::string_view name);

/// Typed scenario configuration; see the README for the key list.
struct ScenarioConfig {
    Command command = Command::Gallery;
    std::string scenario = "quantum-free";

    std::string kernel = "heat";
    double nu = 1.0;
    double label_y = 0.0;
    double label_s = 0.0;
    std::string potential = "zero";
    double potential_lambda = 0.0;

    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t grid_points = 513;
    double T = 1.0;
    std::size_t time_steps = 20;

    DensitySpec rho0;
    DensitySpec rhoT;

    double ipf_tol = 1e-12;
    std::size_t ipf_max_iter = 500;

    std::string drift = "packet";
    std::string direction = "forward";
    std::size_t sde_paths = 100000;
    double sde_dt = 1e-3;
    std::uint64_t seed = 0;
    std::string boundary = "reflect";
    std::size_t sde_records = 10;
    double ks_tol = 0.02;

    std::string velocity = "packet";
    double burgers_tol = 5e-2;

    double ck_s = 0.0;
    double ck_tau = 0.5;
    double ck_t = 1.0;
    double ck_tol = 1e-6;

    std::filesystem::path out_dir = "sbridge-out";

    /// Every key in the map must be known; values are range-checked.
    /// Throws ConfigError (naming the line) or ValidationError.
    static ScenarioConfig from_map(const ConfigMap& map);

    Grid1D grid() const { return Grid1D(x_min, x_max, grid_points); }
    TimeGrid lattice() const { return TimeGrid(0.0, T, time_steps); }
    Kernel make_kernel() const;
    /// Flat key/value echo for reports.
    std::map<std::string, std::string> echo() const;
};

/// Keys accepted by ScenarioConfig::from_map.
std::vector<std::string> config_keys();

struct RunReport {
    std::string command;
    gallery::CheckReport report;
    std::map<std::string, std::string> config;
    std::vector<std::filesystem::path> artifacts;

    bool passed() const noexcept { return report.passed(); }
    /// Deterministic JSON rendering.
    std::string to_json() const;
};

/// Executes the configured command, writes CSV artifacts and report.json into out_dir.
RunReport run(const ScenarioConfig& config);

} // namespace sbridge
