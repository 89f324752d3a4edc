#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plasma_lab/diagnostics.hpp"
#include "plasma_lab/drifts.hpp"
#include "plasma_lab/linmodes.hpp"
#include "plasma_lab/run_config.hpp"

namespace plasma_lab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// 2 for configuration and usage errors (std::invalid_argument), 1 otherwise.
int exit_status_for(const std::exception& e);

inline constexpr const char* kDiagnosticsHeader = "time,dev_plus,dev_minus,elec,e_good,f_bad,gap,mass";

/// Initial condition of a run. Throws ConfigError when the scenario cannot be
/// realised (no growing mode to seed, snapshot on another grid).
PlasmaState initial_state(const RunConfig& config);

/// First time at which the series reaches `level`, interpolated linearly in
/// log(value) between samples.
std::optional<double> crossing_time(std::span<const double> times, std::span<const double> values, double level);

struct GrowthSummary {
    GrowthFit dev;
    GrowthFit sqrt_elec;
    double window_begin = 0.0;
    double window_end = 0.0;
};

struct SimulationResult {
    std::vector<EnergyRecord> records;
    long steps = 0;
    double final_time = 0.0;
    /// Largest dev^2(t) / dev^2(0) over every step (1 when dev(0) = 0).
    double max_amplification = 1.0;
    /// Largest |gap(t) - gap(0)| / dev^2(t) over every step.
    double max_gap_drift = 0.0;
    /// Largest |F(t) / F(0) - 1| over the records, with F the functional of
    /// the reference side (e_good or f_bad).
    double max_functional_drift = 0.0;
    bool poincare_chain = true;
    /// Linear prediction for the seeded mode (eigenmode-seed only).
    double predicted_rate = 0.0;
    std::optional<ModeIndex> seeded_mode;
    std::optional<GrowthSummary> growth;
    std::string growth_note;
};

/// Runs the configured scenario, writing diagnostics.csv, snapshots and
/// summary.txt to config.output_dir.
SimulationResult run_simulation(const RunConfig& config);

/// Growth fit over the window from the first record with dev >= 10 delta to
/// the first with dev >= min(10^3 delta, |mu| / 100), or the last record.
std::optional<GrowthSummary> fit_record_growth(const std::vector<EnergyRecord>& records, double delta,
                                               double mu_norm, std::string* note = nullptr);

void write_diagnostics_csv(std::ostream& out, const std::vector<EnergyRecord>& records);
void write_modes_csv(std::ostream& out, const Params& params, SteadyKind side, int k_max);
void write_trace_csv(std::ostream& out, const Trajectory& traj);

enum class GradientClass { Unstable, Marginal, CertifiedStable };
std::string to_string(GradientClass c);
/// Unstable below 4/(5 pi^2), certified-stable above 1/pi^2, marginal between.
GradientClass classify_gradient(double gradient);

struct SweepRow {
    double gradient = 0.0;
    double t_plus = 0.0;
    double predicted_rate = 0.0;
    double measured_rate = 0.0;
    double max_amplification = 0.0;
    GradientClass classification = GradientClass::Marginal;
    std::string status;
};

/// Comma-separated gradients; throws ConfigError on an empty or malformed list.
std::vector<double> parse_gradient_list(const std::string& text);

/// Worker count: hardware concurrency, capped by PLASMA_LAB_THREADS and by
/// the number of runs.
unsigned sweep_threads(std::size_t runs);

/// One run per gradient under base.output_dir/run_NNN; rows come back in
/// input order and are written to base.output_dir/sweep.csv.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<double>& gradients, unsigned threads);

int cmd_simulate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_modes(double t_plus, double t_minus, double box, const std::string& side, int k_max,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);
int cmd_trace(const ParticleState& p0, double dt, long steps, long decimate, const std::filesystem::path& out_path,
              std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config_path, const std::string& gradients, std::ostream& out,
              std::ostream& err);

}  // namespace plasma_lab
