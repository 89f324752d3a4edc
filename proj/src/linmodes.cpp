#include "plasma_lab/linmodes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace plasma_lab {

namespace {

constexpr double kPi = std::numbers::pi;

double wave_sum(ModeIndex k) { return static_cast<double>(k.k1) * k.k1 + 4.0 * static_cast<double>(k.k2) * k.k2; }

Matrix2 times_i(const Matrix2& b) {
    const Complex i(0.0, 1.0);
    return {{{i * b[0][0], i * b[0][1]}, {i * b[1][0], i * b[1][1]}}};
}

}  // namespace

void ModeIndex::validate() const {
    if (k1 < 1) throw ParameterError("mode index k1 must be >= 1");
    if (k2 == 0) throw ParameterError("mode index k2 must be nonzero");
}

Matrix2 mode_matrix(ModeIndex mode, const Params& params, SteadyKind side) {
    mode.validate();
    const double box = params.box();
    const double omega = 2.0 * kPi * mode.k2 / box;
    const double lambda = kPi * kPi * wave_sum(mode) / (box * box);
    double c = omega / (box * lambda);
    if (side == SteadyKind::GoodCurvature) c = -c;
    return {{{omega * params.t_plus() - c, -c}, {c, omega * params.t_minus() + c}}};
}

double discriminant(ModeIndex mode, const Params& params, SteadyKind side) {
    mode.validate();
    const double dt = params.t_plus() - params.t_minus();
    const double critical = 4.0 * params.box() / (kPi * kPi * wave_sum(mode));
    const double k2sq = static_cast<double>(mode.k2) * mode.k2;
    const double bracket = side == SteadyKind::BadCurvature ? dt - critical : dt + critical;
    return -4.0 * kPi * kPi * k2sq * dt * bracket;
}

double mode_threshold(ModeIndex mode) {
    mode.validate();
    return 4.0 / (kPi * kPi * wave_sum(mode));
}

std::array<Complex, 2> eigenvalues(const Matrix2& a) {
    const Complex half_trace = 0.5 * (a[0][0] + a[1][1]);
    const Complex det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Complex disc = half_trace * half_trace - det;
    // Cancellation noise at a double root would otherwise be amplified by the
    // square root into an O(sqrt(eps)) spurious splitting.
    const double scale = std::norm(half_trace) + std::abs(det);
    if (std::abs(disc) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) disc = 0.0;
    if (disc.imag() == 0.0) disc = Complex(disc.real(), 0.0);  // drop a signed zero
    const Complex root = std::sqrt(disc);  // principal branch: Re(root) >= 0
    return {half_trace + root, half_trace - root};
}

double growth_rate(ModeIndex mode, const Params& params, SteadyKind side) {
    return analyze_mode(mode, params, side).growth_rate;
}

ModeAnalysis analyze_mode(ModeIndex mode, const Params& params, SteadyKind side) {
    ModeAnalysis out;
    out.mode = mode;
    out.side = side;
    out.matrix = mode_matrix(mode, params, side);
    out.discriminant = discriminant(mode, params, side);
    out.threshold = mode_threshold(mode);

    const Matrix2 gen = times_i(out.matrix);
    out.eigenvalues = eigenvalues(gen);
    out.growth_rate = std::max(out.eigenvalues[0].real(), 0.0);

    // Null vector of (gen - lambda I) from whichever row is better conditioned.
    const Complex lam = out.eigenvalues[0];
    const std::array<Complex, 2> from_row0{gen[0][1], lam - gen[0][0]};
    const std::array<Complex, 2> from_row1{lam - gen[1][1], gen[1][0]};
    auto sqnorm = [](const std::array<Complex, 2>& v) { return std::norm(v[0]) + std::norm(v[1]); };
    std::array<Complex, 2> v = sqnorm(from_row0) >= sqnorm(from_row1) ? from_row0 : from_row1;
    const double n = std::sqrt(sqnorm(v));
    if (n > 0.0) {
        v[0] /= n;
        v[1] /= n;
    } else {
        v = {1.0, 0.0};  // diagonal generator
    }
    out.eigenvector = v;
    return out;
}

std::vector<ModeAnalysis> scan_modes(const Params& params, SteadyKind side, int k_max) {
    if (k_max < 1) throw ParameterError("k_max must be >= 1");
    std::vector<ModeAnalysis> out;
    out.reserve(static_cast<std::size_t>(k_max) * 2 * k_max);
    for (int k1 = 1; k1 <= k_max; ++k1)
        for (int k2 = -k_max; k2 <= k_max; ++k2)
            if (k2 != 0) out.push_back(analyze_mode({k1, k2}, params, side));
    return out;
}

std::optional<ModeAnalysis> dominant_mode(const Params& params, SteadyKind side, int k_max) {
    std::optional<ModeAnalysis> best;
    for (auto& a : scan_modes(params, side, k_max)) {
        if (!(a.growth_rate > 0.0)) continue;
        if (!best) {
            best = a;
            continue;
        }
        const double tol = 1e-12 * std::max(a.growth_rate, best->growth_rate);
        if (a.growth_rate > best->growth_rate + tol) {
            best = a;
        } else if (std::abs(a.growth_rate - best->growth_rate) <= tol) {
            const double wa = wave_sum(a.mode);
            const double wb = wave_sum(best->mode);
            if (wa < wb || (wa == wb && a.mode.k2 > 0 && best->mode.k2 < 0)) best = a;
        }
    }
    return best;
}

PlasmaState eigenmode_fields(const ModeAnalysis& analysis, double amplitude, const Grid& grid) {
    if (!(analysis.growth_rate > 0.0)) throw ParameterError("eigenmode seeding needs a growing mode");
    if (!(amplitude >= 0.0)) throw ParameterError("amplitude must be non-negative");
    const double box = grid.box();
    const ModeIndex k = analysis.mode;
    const auto& v = analysis.eigenvector;

    auto species = [&](Complex h) {
        return Field::sample(grid, [&](double x1, double x2) {
            const double phase = 2.0 * kPi * k.k2 * x2 / box;
            return std::sin(k.k1 * kPi * x1 / box) * (h * std::polar(1.0, phase)).real();
        });
    };
    PlasmaState out{species(v[0]), species(v[1]), 0.0};
    const double norm = std::sqrt(inner(out.rho_plus, out.rho_plus) + inner(out.rho_minus, out.rho_minus));
    if (!(norm > 0.0)) throw ConsistencyError("mode is not resolved on this grid");
    out.rho_plus *= amplitude / norm;
    out.rho_minus *= amplitude / norm;
    return out;
}

}  // namespace plasma_lab
