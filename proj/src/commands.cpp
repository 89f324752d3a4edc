#include "plasma_lab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "plasma_lab/format.hpp"
#include "plasma_lab/snapshot.hpp"
#include "plasma_lab/transport.hpp"

namespace plasma_lab {

namespace fs = std::filesystem;

namespace {

constexpr int kSeedScanKmax = 8;

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void write_record_row(std::ostream& out, const EnergyRecord& r) {
    out << format_double(r.time) << ',' << format_double(r.dev_plus) << ',' << format_double(r.dev_minus) << ','
        << format_double(r.elec) << ',' << format_double(r.e_good) << ',' << format_double(r.f_bad) << ','
        << format_double(r.gap) << ',' << format_double(r.mass) << '\n';
}

double steady_norm(const Grid& grid) {
    const PlasmaState mu = steady_state(SteadyKind::BadCurvature, grid);
    return std::sqrt(inner(mu.rho_plus, mu.rho_plus) + inner(mu.rho_minus, mu.rho_minus));
}

std::optional<ModeAnalysis> seed_analysis(const RunConfig& config) {
    const Params params = config.params();
    if (config.seed_mode) {
        ModeAnalysis a = analyze_mode(*config.seed_mode, params, SteadyKind::BadCurvature);
        if (a.growth_rate > 0.0) return a;
        return std::nullopt;
    }
    return dominant_mode(params, SteadyKind::BadCurvature, kSeedScanKmax);
}

void write_summary(const fs::path& path, const RunConfig& config, const SimulationResult& r) {
    std::ofstream out = open_output(path);
    const double gradient = config.params().gradient();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    out << "scenario = " << to_string(config.scenario) << '\n';
    out << "reference = " << to_string(config.reference_kind()) << '\n';
    out << "gradient = " << format_double(gradient) << '\n';
    out << "steps = " << r.steps << '\n';
    out << "final_time = " << format_double(r.final_time) << '\n';
    out << "records = " << r.records.size() << '\n';
    out << "max_dev2_amplification = " << format_double(r.max_amplification) << '\n';
    if (gradient * pi2 > 1.0)
        out << "hmode_bound = " << format_double(1.0 / (1.0 - 1.0 / (pi2 * gradient))) << '\n';
    out << "max_gap_drift = " << format_double(r.max_gap_drift) << '\n';
    out << "max_functional_drift = " << format_double(r.max_functional_drift) << '\n';
    out << "poincare_chain = " << (r.poincare_chain ? "ok" : "violated") << '\n';
    if (config.scenario == Scenario::EigenmodeSeed) {
        if (r.seeded_mode) out << "seed_mode = [" << r.seeded_mode->k1 << ", " << r.seeded_mode->k2 << "]\n";
        out << "predicted_rate = " << format_double(r.predicted_rate) << '\n';
        if (r.growth) {
            out << "fitted_rate = " << format_double(r.growth->dev.rate) << '\n';
            out << "fit_quality = " << format_double(r.growth->dev.quality) << '\n';
            out << "fit_samples = " << r.growth->dev.samples << '\n';
            out << "fit_window = [" << format_double(r.growth->window_begin) << ", "
                << format_double(r.growth->window_end) << "]\n";
            out << "elec_rate = " << format_double(r.growth->sqrt_elec.rate) << '\n';
        } else {
            out << "fitted_rate = none\n";
            out << "fit_note = \"" << r.growth_note << "\"\n";
        }
    }
}

}  // namespace

int exit_status_for(const std::exception& e) {
    return dynamic_cast<const std::invalid_argument*>(&e) ? kExitConfig : kExitRuntime;
}

PlasmaState initial_state(const RunConfig& config) {
    const Grid grid = config.grid();
    switch (config.scenario) {
        case Scenario::SteadyGood:
        case Scenario::SteadyBad: {
            const PlasmaState mu = steady_state(config.reference_kind(), grid);
            if (config.seed_amplitude == 0.0) return mu;
            return superpose(mu, smooth_perturbation(grid, config.seed_amplitude, config.perturbation_kmax,
                                                     config.seed));
        }
        case Scenario::EigenmodeSeed: {
            const auto analysis = seed_analysis(config);
            if (!analysis) throw ConfigError("eigenmode-seed: no growing mode at this gradient");
            const PlasmaState mu = steady_state(SteadyKind::BadCurvature, grid);
            return superpose(mu, eigenmode_fields(*analysis, config.seed_amplitude, grid));
        }
        case Scenario::FileInit: {
            PlasmaState state = read_snapshot(config.init_file);
            if (!(state.grid() == grid))
                throw ConfigError("init_file grid does not match n1, n2 and box of the config");
            if (state.time > config.t_end) throw ConfigError("init_file time lies beyond t_end");
            return state;
        }
    }
    throw ConsistencyError("unhandled scenario");
}

std::optional<double> crossing_time(std::span<const double> times, std::span<const double> values, double level) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < level) continue;
        if (i == 0) return times[0];
        const double a = values[i - 1];
        const double b = values[i];
        if (a > 0.0 && b > a) {
            const double s = std::log(level / a) / std::log(b / a);
            return times[i - 1] + s * (times[i] - times[i - 1]);
        }
        return times[i];
    }
    return std::nullopt;
}

std::optional<GrowthSummary> fit_record_growth(const std::vector<EnergyRecord>& records, double delta,
                                               double mu_norm, std::string* note) {
    auto fail = [&](const std::string& why) -> std::optional<GrowthSummary> {
        if (note) *note = why;
        return std::nullopt;
    };
    if (!(delta > 0.0)) return fail("seed amplitude is zero");
    std::vector<double> t, dev, elec;
    for (const auto& r : records) {
        t.push_back(r.time);
        dev.push_back(r.dev());
        elec.push_back(std::sqrt(r.elec));
    }
    const auto begin = std::find_if(dev.begin(), dev.end(), [&](double d) { return d >= 10.0 * delta; });
    if (begin == dev.end()) return fail("deviation never reached 10 x seed amplitude");
    const double cap = std::min(1e3 * delta, 0.01 * mu_norm);
    const auto end = std::find_if(begin, dev.end(), [&](double d) { return d >= cap; });
    const std::size_t ib = static_cast<std::size_t>(begin - dev.begin());
    const std::size_t ie = end == dev.end() ? dev.size() - 1 : static_cast<std::size_t>(end - dev.begin());
    GrowthSummary s;
    s.window_begin = t[ib];
    s.window_end = t[ie];
    try {
        s.dev = fit_growth_rate(t, dev, s.window_begin, s.window_end);
        s.sqrt_elec = fit_growth_rate(t, elec, s.window_begin, s.window_end);
    } catch (const ParameterError& e) {
        return fail(e.what());
    }
    return s;
}

SimulationResult run_simulation(const RunConfig& config) {
    config.validate();
    const Params params = config.params();
    const Grid grid = config.grid();
    const SteadyKind reference = config.reference_kind();
    const PlasmaState mu = steady_state(reference, grid);
    const Transport transport(grid, params);

    SimulationResult result;
    PlasmaState state = initial_state(config);
    if (config.scenario == Scenario::EigenmodeSeed) {
        const auto analysis = seed_analysis(config);
        result.seeded_mode = analysis->mode;
        result.predicted_rate = analysis->growth_rate;
    }

    fs::create_directories(config.output_dir);
    std::ofstream csv = open_output(config.output_dir / "diagnostics.csv");
    csv << kDiagnosticsHeader << '\n';

    double dev2_initial = 0.0;
    double gap_initial = 0.0;
    double functional_initial = 0.0;
    auto observe = [&](const PlasmaState& s, long steps) {
        const double dp = l2_norm(s.rho_plus - mu.rho_plus);
        const double dm = l2_norm(s.rho_minus - mu.rho_minus);
        const double dev2 = dp * dp + dm * dm;
        const double gap = dp * dp - dm * dm;
        if (steps == 0) {
            dev2_initial = dev2;
            gap_initial = gap;
        }
        if (dev2_initial > 0.0) result.max_amplification = std::max(result.max_amplification, dev2 / dev2_initial);
        if (dev2 > 0.0) result.max_gap_drift = std::max(result.max_gap_drift, std::abs(gap - gap_initial) / dev2);

        const bool final = s.time >= config.t_end;
        if (steps % config.record_every == 0 || final) {
            const EnergyRecord r = record(s, params, reference, transport.plan());
            const double charge = l2_norm(net_charge(s));
            result.poincare_chain = result.poincare_chain && poincare_chain_holds(r, charge * charge, params);
            const double functional = reference == SteadyKind::GoodCurvature ? r.e_good : r.f_bad;
            if (result.records.empty()) functional_initial = functional;
            const double scale = std::max(std::abs(functional_initial), r.dev_squared());
            if (scale > 0.0)
                result.max_functional_drift =
                    std::max(result.max_functional_drift, std::abs(functional - functional_initial) / scale);
            result.records.push_back(r);
            write_record_row(csv, r);
        }
        if (steps % config.snapshot_every == 0 || final)
            write_snapshot(config.output_dir / snapshot_name(steps), s);
        result.steps = steps;
    };

    state = transport.run(std::move(state), config.stepper(), config.t_end, {observe});
    result.final_time = state.time;
    csv.flush();
    if (!csv) throw std::runtime_error("failed writing diagnostics.csv");

    if (config.scenario == Scenario::EigenmodeSeed)
        result.growth = fit_record_growth(result.records, config.seed_amplitude, steady_norm(grid), &result.growth_note);
    write_summary(config.output_dir / "summary.txt", config, result);
    return result;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<EnergyRecord>& records) {
    out << kDiagnosticsHeader << '\n';
    for (const auto& r : records) write_record_row(out, r);
}

void write_modes_csv(std::ostream& out, const Params& params, SteadyKind side, int k_max) {
    out << "k1,k2,discriminant,growth_rate,threshold\n";
    for (const auto& a : scan_modes(params, side, k_max))
        out << a.mode.k1 << ',' << a.mode.k2 << ',' << format_double(a.discriminant) << ','
            << format_double(a.growth_rate) << ',' << format_double(a.threshold) << '\n';
    if (const auto best = dominant_mode(params, side, k_max))
        out << "# dominant k1=" << best->mode.k1 << " k2=" << best->mode.k2
            << " growth_rate=" << format_double(best->growth_rate) << '\n';
    else
        out << "# stable\n";
}

void write_trace_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x1,x2,v1,v2\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const ParticleState& p = traj.states[i];
        out << format_double(traj.times[i]) << ',' << format_double(p.x1) << ',' << format_double(p.x2) << ','
            << format_double(p.v1) << ',' << format_double(p.v2) << '\n';
    }
    const OrbitResiduals r = orbit_invariants(traj);
    out << "# invariants c1_drift=" << format_double(r.c1_drift) << " c2_drift=" << format_double(r.c2_drift)
        << " fall_drift=" << format_double(r.fall_drift);
    if (traj.times.size() >= 2) out << " fall_rate=" << format_double(fitted_fall_rate(traj));
    out << '\n';
}

std::string to_string(GradientClass c) {
    switch (c) {
        case GradientClass::Unstable: return "unstable";
        case GradientClass::Marginal: return "marginal";
        case GradientClass::CertifiedStable: return "certified-stable";
    }
    return "unknown";
}

GradientClass classify_gradient(double gradient) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (gradient < mode_threshold({1, 1})) return GradientClass::Unstable;
    if (gradient > 1.0 / pi2) return GradientClass::CertifiedStable;
    return GradientClass::Marginal;
}

std::vector<double> parse_gradient_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in gradient list '" + text + "'");
        const std::string token = item.substr(b, e - b + 1);
        std::size_t used = 0;
        double g = 0.0;
        try {
            g = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(g)) throw ConfigError("bad gradient '" + token + "'");
        out.push_back(g);
    }
    if (out.empty()) throw ConfigError("gradient list is empty");
    return out;
}

unsigned sweep_threads(std::size_t runs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PLASMA_LAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) throw ConfigError("PLASMA_LAB_THREADS must be a positive integer");
        n = std::min<unsigned long>(n, static_cast<unsigned long>(cap));
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, runs)));
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<double>& gradients, unsigned threads) {
    if (gradients.empty()) throw ConfigError("gradient list is empty");
    std::vector<SweepRow> rows(gradients.size());

    auto run_one = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.gradient = gradients[i];
        row.t_plus = base.t_minus + gradients[i] * base.box;
        row.classification = classify_gradient(gradients[i]);
        try {
            RunConfig cfg = base;
            cfg.t_plus = row.t_plus;
            std::ostringstream name;
            name << "run_" << std::setw(3) << std::setfill('0') << i;
            cfg.output_dir = base.output_dir / name.str();
            const Params params = cfg.params();
            if (const auto best = dominant_mode(params, SteadyKind::BadCurvature, kSeedScanKmax))
                row.predicted_rate = best->growth_rate;
            if (cfg.scenario == Scenario::EigenmodeSeed && !seed_analysis(cfg)) {
                cfg.scenario = Scenario::SteadyBad;
                cfg.seed_mode.reset();
            }
            fs::create_directories(cfg.output_dir);
            open_output(cfg.output_dir / "config.toml") << to_toml(cfg);
            const SimulationResult r = run_simulation(cfg);
            row.measured_rate = r.growth ? r.growth->dev.rate : 0.0;
            row.max_amplification = r.max_amplification;
            row.status = "ok";
        } catch (const std::exception& e) {
            std::string msg = std::string("failed: ") + e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            row.status = msg;
        }
    };

    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < std::max(1u, threads); ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < rows.size(); i = next++) run_one(i);
            });
    }

    std::ofstream out = open_output(base.output_dir / "sweep.csv");
    out << "gradient,t_plus,predicted_rate,measured_rate,max_amplification,class,status\n";
    for (const auto& r : rows)
        out << format_double(r.gradient) << ',' << format_double(r.t_plus) << ',' << format_double(r.predicted_rate)
            << ',' << format_double(r.measured_rate) << ',' << format_double(r.max_amplification) << ','
            << to_string(r.classification) << ',' << r.status << '\n';
    return rows;
}

int cmd_simulate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig config = load_config(config_path);
        const SimulationResult r = run_simulation(config);
        out << "steps " << r.steps << ", t = " << format_double(r.final_time) << ", records " << r.records.size()
            << ", max dev^2 amplification " << format_double(r.max_amplification) << '\n';
        if (r.growth)
            out << "fitted growth rate " << format_double(r.growth->dev.rate) << " (predicted "
                << format_double(r.predicted_rate) << ", quality " << format_double(r.growth->dev.quality) << ")\n";
        out << "artifacts in " << config.output_dir.string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "simulate: " << e.what() << '\n';
        return exit_status_for(e);
    }
}

int cmd_modes(double t_plus, double t_minus, double box, const std::string& side, int k_max, const fs::path& out_dir,
              std::ostream& out, std::ostream& err) {
    try {
        const Params params(t_plus, t_minus, box);
        const SteadyKind kind = parse_steady_kind(side);
        if (k_max < 1) throw ParameterError("kmax must be >= 1");
        std::ostringstream table;
        write_modes_csv(table, params, kind, k_max);
        open_output(out_dir / "modes.csv") << table.str();
        const std::string text = table.str();
        const auto footer = text.rfind("# ");
        out << text.substr(footer);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "modes: " << e.what() << '\n';
        return exit_status_for(e);
    }
}

int cmd_trace(const ParticleState& p0, double dt, long steps, long decimate, const fs::path& out_path,
              std::ostream& out, std::ostream& err) {
    try {
        const Trajectory traj = integrate_orbit(p0, dt, steps, decimate);
        std::ofstream file = open_output(out_path);
        write_trace_csv(file, traj);
        if (!file) throw std::runtime_error("failed writing " + out_path.string());
        out << traj.times.size() << " rows written to " << out_path.string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "trace: " << e.what() << '\n';
        return exit_status_for(e);
    }
}

int cmd_sweep(const fs::path& config_path, const std::string& gradients, std::ostream& out, std::ostream& err) {
    try {
        const std::vector<double> list = parse_gradient_list(gradients);
        const RunConfig base = load_config(config_path);
        const auto rows = run_sweep(base, list, sweep_threads(list.size()));
        for (const auto& r : rows)
            out << "gradient " << format_double(r.gradient) << ": " << to_string(r.classification) << ", predicted "
                << format_double(r.predicted_rate) << ", measured " << format_double(r.measured_rate) << ", "
                << r.status << '\n';
        out << "table in " << (base.output_dir / "sweep.csv").string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "sweep: " << e.what() << '\n';
        return exit_status_for(e);
    }
}

}  // namespace plasma_lab
