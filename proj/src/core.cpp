#include "plasma_lab/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace plasma_lab {

Params::Params(double t_plus, double t_minus, double box)
    : t_plus_(t_plus), t_minus_(t_minus), box_(box) {
    if (!(box > 0.0) || !std::isfinite(box))
        throw ParameterError("box length must be positive and finite");
    if (!(t_minus > 0.0) || !(t_plus > t_minus) || !std::isfinite(t_plus))
        throw ParameterError("temperatures must satisfy T+ > T- > 0");
}

Params Params::from_gradient(double t_minus, double box, double gradient) {
    return Params(t_minus + gradient * box, t_minus, box);
}

Grid make_grid(int n1, int n2, double box) {
    auto pow2 = [](int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); };
    if (n1 < 5 || n2 < 4) {
        std::ostringstream msg;
        msg << "grid " << n1 << "x" << n2 << " too small (need n1 >= 5, n2 >= 4)";
        throw SizingError(msg.str());
    }
    if (!pow2(n1 - 1) || !pow2(n2)) {
        std::ostringstream msg;
        msg << "grid " << n1 << "x" << n2 << ": n1-1 and n2 must be powers of two";
        throw SizingError(msg.str());
    }
    if (!(box > 0.0) || !std::isfinite(box)) throw SizingError("box length must be positive");
    return Grid(n1, n2, box);
}

Field::Field(const Grid& grid, double value) : grid_(grid), data_(grid.size(), value) {}

Field::Field(const Grid& grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
    if (data_.size() != grid_.size()) throw SizingError("field data does not match grid size");
    if (!all_finite()) throw ConsistencyError("field data contains non-finite samples");
}

bool Field::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Field::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Field::max() const { return *std::max_element(data_.begin(), data_.end()); }

Field& Field::operator+=(const Field& other) {
    if (!(grid_ == other.grid_)) throw SizingError("field grids differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    if (!(grid_ == other.grid_)) throw SizingError("field grids differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Field& Field::operator+=(double s) {
    for (double& v : data_) v += s;
    return *this;
}

std::string to_string(SteadyKind kind) {
    return kind == SteadyKind::GoodCurvature ? "good" : "bad";
}

SteadyKind parse_steady_kind(const std::string& text) {
    if (text == "good") return SteadyKind::GoodCurvature;
    if (text == "bad") return SteadyKind::BadCurvature;
    throw ParameterError("side must be 'good' or 'bad', got '" + text + "'");
}

PlasmaState steady_state(SteadyKind kind, const Grid& grid) {
    const double box = grid.box();
    Field rising = Field::sample(grid, [box](double x1, double) { return x1 / box; });
    Field falling = Field::sample(grid, [box](double x1, double) { return 1.0 - x1 / box; });
    if (kind == SteadyKind::BadCurvature) return {std::move(falling), std::move(rising), 0.0};
    return {std::move(rising), std::move(falling), 0.0};
}

double integrate(const Field& f) {
    const Grid& g = f.grid();
    double total = 0.0;
    for (int j = 0; j < g.n1(); ++j) {
        double row = 0.0;
        for (int m = 0; m < g.n2(); ++m) row += f(j, m);
        const double w = (j == 0 || j == g.n1() - 1) ? 0.5 : 1.0;
        total += w * row;
    }
    return total * g.h1() * g.h2();
}

double inner(const Field& a, const Field& b) {
    const Grid& g = a.grid();
    if (!(g == b.grid())) throw SizingError("field grids differ");
    double total = 0.0;
    for (int j = 0; j < g.n1(); ++j) {
        double row = 0.0;
        for (int m = 0; m < g.n2(); ++m) row += a(j, m) * b(j, m);
        const double w = (j == 0 || j == g.n1() - 1) ? 0.5 : 1.0;
        total += w * row;
    }
    return total * g.h1() * g.h2();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double total_mass(const PlasmaState& state) {
    return integrate(state.rho_plus) + integrate(state.rho_minus);
}

PlasmaState smooth_perturbation(const Grid& grid, double amplitude, int k_max, unsigned seed) {
    if (k_max < 1) throw ParameterError("perturbation needs k_max >= 1");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ParameterError("amplitude must be finite and >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double pi = std::numbers::pi;
    const double box = grid.box();

    auto species = [&] {
        Field f(grid);
        for (int k1 = 1; k1 <= k_max; ++k1) {
            for (int k2 = 1; k2 <= k_max; ++k2) {
                // Decay with wavenumber keeps the sum smooth.
                const double scale = 1.0 / (k1 * k1 + k2 * k2);
                const double a = scale * normal(rng);
                const double b = scale * normal(rng);
                for (int j = 0; j < grid.n1(); ++j) {
                    const double s = std::sin(k1 * pi * grid.x1(j) / box);
                    for (int m = 0; m < grid.n2(); ++m) {
                        const double phase = 2.0 * pi * k2 * grid.x2(m) / box;
                        f(j, m) += s * (a * std::cos(phase) + b * std::sin(phase));
                    }
                }
            }
        }
        return f;
    };

    PlasmaState out{species(), species(), 0.0};
    const double norm = std::sqrt(inner(out.rho_plus, out.rho_plus) + inner(out.rho_minus, out.rho_minus));
    const double s = norm > 0.0 ? amplitude / norm : 0.0;
    out.rho_plus *= s;
    out.rho_minus *= s;
    return out;
}

PlasmaState superpose(const PlasmaState& base, const PlasmaState& perturbation) {
    return {base.rho_plus + perturbation.rho_plus, base.rho_minus + perturbation.rho_minus, base.time};
}

}  // namespace plasma_lab
