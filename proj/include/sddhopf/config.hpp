#pragma once

#include "sddhopf/model.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sddhopf {

/// Command options shared by the CLI subcommands. Optional members without a
/// value fall back to quantities computed from the model.
struct RunOptions {
    // simulate
    double t0 = 0.0;
    double t1 = 100.0;
    double step = 1e-2;
    std::optional<std::vector<double>> x0;
    bool frozen = false;

    // crossing
    std::optional<double> crossing_alpha;
    std::optional<double> crossing_beta;
    std::optional<double> delta;
    double omega_half = 0.5;
    int min_depth = 6;
    int max_depth = 48;

    // hopf
    double alpha_max = 1e4;
    int grid_points = 1000;
    double fd_step = 1e-4;

    // orbit / branch
    double t_end = 1500.0;
    double perturbation = 1e-3;
    double transient_fraction = 0.6;
    int returns = 5;
    int samples = 256;
    double max_return_spread = 1e-5;
    double max_closure = 1e-6;
    int fourier_modes = 64;
    double branch_lo = 5.8;
    double branch_hi = 9.8;
    int branch_points = 21;

    // bounds
    double tau_sup = 0.0;
    double tau_dot_sup = 0.0;
    double xdot_sup = 0.0;
};

struct RunConfig {
    GoodwinParameters params;
    RunOptions options;
    std::string source;  ///< path the config was read from
};

/// Reads a JSON or flat TOML file, applies `key=value` overrides and
/// validates the result. A JSON document with a "config" member (a run
/// summary) is read from that member.
/// Throws ParseError and SchemaError.
[[nodiscard]] RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Same as parse_config for an already loaded document.
[[nodiscard]] RunConfig config_from_json(const nlohmann::json& doc, const std::vector<std::string>& overrides = {});

/// Flat TOML subset: `key = value` lines with numbers, booleans, strings and
/// one-line arrays; `#` comments. Throws ParseError.
[[nodiscard]] nlohmann::json parse_flat_toml(const std::string& text);

/// Every key with its effective value; feeding this back reproduces the config.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sddhopf
