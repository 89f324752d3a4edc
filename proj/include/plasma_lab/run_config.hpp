#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "plasma_lab/core.hpp"
#include "plasma_lab/linmodes.hpp"
#include "plasma_lab/transport.hpp"

namespace plasma_lab {

/// Invalid or unreadable run configuration (exit status 2).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Scenario { SteadyGood, SteadyBad, EigenmodeSeed, FileInit };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

struct RunConfig {
    double t_plus = 0.0;
    double t_minus = 0.0;
    double box = 1.0;
    int n1 = 0;
    int n2 = 0;
    Scenario scenario = Scenario::SteadyBad;
    double seed_amplitude = 0.0;
    std::optional<ModeIndex> seed_mode;
    double t_end = 0.0;
    double cfl_safety = 0.5;
    long record_every = 1;
    long snapshot_every = 100;
    std::filesystem::path output_dir;

    double dt_max = 0.1;
    std::filesystem::path init_file;
    std::optional<SteadyKind> reference;
    Coupling coupling = Coupling::PredictorCorrector;
    Interpolation interpolation = Interpolation::PeriodicSplineX2;
    int perturbation_kmax = 2;
    unsigned seed = 1;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;

    Params params() const;
    Grid grid() const;
    StepperConfig stepper() const;
    /// Steady profile the diagnostics compare against.
    SteadyKind reference_kind() const;
};

/// Parses flat TOML: `key = value` lines with numbers, "strings", booleans,
/// two-integer arrays and # comments. Unknown or repeated keys, missing
/// required keys and ill-typed values throw ConfigError. The result is
/// validated.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Serialises every key so that parse_config reproduces the config.
std::string to_toml(const RunConfig& config);

}  // namespace plasma_lab
