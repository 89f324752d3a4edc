#include "plasma_lab/run_config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "plasma_lab/format.hpp"

namespace plasma_lab {

namespace {

using IntPair = std::pair<long, long>;
using Value = std::variant<double, long, std::string, bool, IntPair>;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::optional<long> parse_long(const std::string& text) {
    std::string digits;
    for (char c : text)
        if (c != '_') digits.push_back(c);
    long v = 0;
    const char* first = digits.data();
    if (!digits.empty() && digits.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || first == ptr) return std::nullopt;
    return v;
}

std::optional<double> parse_double(const std::string& text) {
    std::string digits;
    for (char c : text)
        if (c != '_') digits.push_back(c);
    double v = 0.0;
    const char* first = digits.data();
    if (!digits.empty() && digits.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || first == ptr) return std::nullopt;
    return v;
}

Value parse_value(const std::string& text, int line) {
    auto fail = [&](const std::string& why) {
        return ConfigError("line " + std::to_string(line) + ": " + why);
    };
    if (text.empty()) throw fail("missing value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw fail("unterminated string");
        const std::string inner = text.substr(1, text.size() - 2);
        if (inner.find_first_of("\"\\") != std::string::npos) throw fail("escapes are not supported in strings");
        return inner;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw fail("unterminated array");
        const std::string body = text.substr(1, text.size() - 2);
        const auto comma = body.find(',');
        if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
            throw fail("arrays must hold exactly two integers");
        const auto a = parse_long(trim(body.substr(0, comma)));
        const auto b = parse_long(trim(body.substr(comma + 1)));
        if (!a || !b) throw fail("arrays must hold exactly two integers");
        return IntPair{*a, *b};
    }
    if (text == "true") return true;
    if (text == "false") return false;
    if (auto v = parse_long(text)) return *v;
    if (auto v = parse_double(text)) return *v;
    throw fail("cannot parse value '" + text + "'");
}

class Reader {
public:
    explicit Reader(std::map<std::string, std::pair<Value, int>> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double number(const std::string& key) {
        const auto& [v, line] = take(key);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        if (const auto* l = std::get_if<long>(&v)) return static_cast<double>(*l);
        throw type_error(key, line, "a number");
    }

    long integer(const std::string& key) {
        const auto& [v, line] = take(key);
        if (const auto* l = std::get_if<long>(&v)) return *l;
        throw type_error(key, line, "an integer");
    }

    std::string string(const std::string& key) {
        const auto& [v, line] = take(key);
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        throw type_error(key, line, "a string");
    }

    IntPair pair(const std::string& key) {
        const auto& [v, line] = take(key);
        if (const auto* p = std::get_if<IntPair>(&v)) return *p;
        throw type_error(key, line, "a [k1, k2] array");
    }

    void reject_leftovers() const {
        for (const auto& [key, entry] : entries_)
            if (!used_.count(key))
                throw ConfigError("line " + std::to_string(entry.second) + ": unknown key '" + key + "'");
    }

private:
    const std::pair<Value, int>& take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    static ConfigError type_error(const std::string& key, int line, const char* expected) {
        return ConfigError("line " + std::to_string(line) + ": '" + key + "' must be " + expected);
    }

    std::map<std::string, std::pair<Value, int>> entries_;
    std::set<std::string> used_;
};

int to_int(long v, const char* key) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(std::string("'") + key + "' is out of range");
    return static_cast<int>(v);
}

Coupling parse_coupling(const std::string& s) {
    if (s == "frozen") return Coupling::Frozen;
    if (s == "predictor-corrector") return Coupling::PredictorCorrector;
    throw ConfigError("coupling must be 'frozen' or 'predictor-corrector', got '" + s + "'");
}

Interpolation parse_interpolation(const std::string& s) {
    if (s == "lagrange") return Interpolation::Lagrange;
    if (s == "spline-x2") return Interpolation::PeriodicSplineX2;
    throw ConfigError("interpolation must be 'lagrange' or 'spline-x2', got '" + s + "'");
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::SteadyGood: return "steady-good";
        case Scenario::SteadyBad: return "steady-bad";
        case Scenario::EigenmodeSeed: return "eigenmode-seed";
        case Scenario::FileInit: return "file-init";
    }
    return "unknown";
}

Scenario parse_scenario(const std::string& text) {
    for (Scenario s : {Scenario::SteadyGood, Scenario::SteadyBad, Scenario::EigenmodeSeed, Scenario::FileInit})
        if (to_string(s) == text) return s;
    throw ConfigError("scenario must be steady-good, steady-bad, eigenmode-seed or file-init, got '" + text + "'");
}

void RunConfig::validate() const {
    try {
        (void)params();
        (void)grid();
        stepper().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(seed_amplitude >= 0.0) || !std::isfinite(seed_amplitude))
        throw ConfigError("seed_amplitude must be finite and >= 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and >= 0");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (perturbation_kmax < 1) throw ConfigError("perturbation_kmax must be >= 1");
    if (seed_mode) {
        if (scenario != Scenario::EigenmodeSeed) throw ConfigError("seed_mode only applies to eigenmode-seed");
        try {
            seed_mode->validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("seed_mode: ") + e.what());
        }
    }
    if (scenario == Scenario::FileInit && init_file.empty())
        throw ConfigError("scenario file-init needs init_file");
    if (scenario != Scenario::FileInit && !init_file.empty())
        throw ConfigError("init_file only applies to file-init");
    if (scenario != Scenario::FileInit && reference)
        throw ConfigError("reference only applies to file-init");
}

Params RunConfig::params() const { return Params(t_plus, t_minus, box); }

Grid RunConfig::grid() const { return make_grid(n1, n2, box); }

StepperConfig RunConfig::stepper() const {
    StepperConfig cfg;
    cfg.dt = dt_max;
    cfg.cfl_safety = cfl_safety;
    cfg.coupling = coupling;
    cfg.interpolation = interpolation;
    return cfg;
}

SteadyKind RunConfig::reference_kind() const {
    switch (scenario) {
        case Scenario::SteadyGood: return SteadyKind::GoodCurvature;
        case Scenario::SteadyBad:
        case Scenario::EigenmodeSeed: return SteadyKind::BadCurvature;
        case Scenario::FileInit: return reference.value_or(SteadyKind::BadCurvature);
    }
    return SteadyKind::BadCurvature;
}

RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::pair<Value, int>> entries;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(strip_comment(raw));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") != std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": invalid key '" + key + "'");
        if (entries.count(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        entries.emplace(key, std::make_pair(parse_value(trim(text.substr(eq + 1)), line), line));
    }

    Reader r(std::move(entries));
    RunConfig c;
    c.t_plus = r.number("t_plus");
    c.t_minus = r.number("t_minus");
    c.box = r.number("box");
    c.n1 = to_int(r.integer("n1"), "n1");
    c.n2 = to_int(r.integer("n2"), "n2");
    c.scenario = parse_scenario(r.string("scenario"));
    c.t_end = r.number("t_end");
    c.output_dir = r.string("output_dir");
    if (r.has("seed_amplitude")) c.seed_amplitude = r.number("seed_amplitude");
    if (r.has("seed_mode")) {
        const auto [k1, k2] = r.pair("seed_mode");
        c.seed_mode = ModeIndex{to_int(k1, "seed_mode"), to_int(k2, "seed_mode")};
    }
    if (r.has("cfl_safety")) c.cfl_safety = r.number("cfl_safety");
    if (r.has("record_every")) c.record_every = r.integer("record_every");
    if (r.has("snapshot_every")) c.snapshot_every = r.integer("snapshot_every");
    if (r.has("dt_max")) c.dt_max = r.number("dt_max");
    if (r.has("init_file")) c.init_file = r.string("init_file");
    if (r.has("reference")) {
        try {
            c.reference = parse_steady_kind(r.string("reference"));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("reference: ") + e.what());
        }
    }
    if (r.has("coupling")) c.coupling = parse_coupling(r.string("coupling"));
    if (r.has("interpolation")) c.interpolation = parse_interpolation(r.string("interpolation"));
    if (r.has("perturbation_kmax")) c.perturbation_kmax = to_int(r.integer("perturbation_kmax"), "perturbation_kmax");
    if (r.has("seed")) {
        const long s = r.integer("seed");
        if (s < 0 || s > std::numeric_limits<unsigned>::max()) throw ConfigError("seed is out of range");
        c.seed = static_cast<unsigned>(s);
    }
    r.reject_leftovers();
    c.validate();
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

std::string to_toml(const RunConfig& c) {
    std::ostringstream out;
    auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
    out << "t_plus = " << format_double(c.t_plus) << "\n";
    out << "t_minus = " << format_double(c.t_minus) << "\n";
    out << "box = " << format_double(c.box) << "\n";
    out << "n1 = " << c.n1 << "\n";
    out << "n2 = " << c.n2 << "\n";
    out << "scenario = " << quoted(to_string(c.scenario)) << "\n";
    out << "seed_amplitude = " << format_double(c.seed_amplitude) << "\n";
    if (c.seed_mode) out << "seed_mode = [" << c.seed_mode->k1 << ", " << c.seed_mode->k2 << "]\n";
    out << "t_end = " << format_double(c.t_end) << "\n";
    out << "cfl_safety = " << format_double(c.cfl_safety) << "\n";
    out << "record_every = " << c.record_every << "\n";
    out << "snapshot_every = " << c.snapshot_every << "\n";
    out << "output_dir = " << quoted(c.output_dir.string()) << "\n";
    out << "dt_max = " << format_double(c.dt_max) << "\n";
    if (!c.init_file.empty()) out << "init_file = " << quoted(c.init_file.string()) << "\n";
    if (c.reference) out << "reference = " << quoted(c.reference == SteadyKind::GoodCurvature ? "good" : "bad") << "\n";
    out << "coupling = "
        << quoted(c.coupling == Coupling::Frozen ? "frozen" : "predictor-corrector") << "\n";
    out << "interpolation = "
        << quoted(c.interpolation == Interpolation::Lagrange ? "lagrange" : "spline-x2") << "\n";
    out << "perturbation_kmax = " << c.perturbation_kmax << "\n";
    out << "seed = " << c.seed << "\n";
    return out.str();
}

}  // namespace plasma_lab
