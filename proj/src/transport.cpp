#include "plasma_lab/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace plasma_lab {

namespace {

constexpr double kSpeedFloor = 1e-12;

// Weights of the 4-point Lagrange polynomial through nodes -1, 0, 1, 2 at s.
std::array<double, 4> cubic_weights(double s) {
    return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

struct Stencil {
    int first;
    std::array<double, 4> w;
};

// Stencil along x1 anchored at `first` (nodes first..first+3), kept inside
// [0, n1-1].
Stencil x1_stencil(const Grid& g, double x1) {
    const double u = x1 / g.h1();
    int cell = static_cast<int>(std::floor(u));
    int first = std::clamp(cell - 1, 0, g.n1() - 4);
    return {first, cubic_weights(u - first - 1)};
}

// Uniform cubic B-spline weights for nodes -1, 0, 1, 2 at s in [0, 1).
std::array<double, 4> bspline_weights(double s) {
    const double r = 1.0 - s;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return {r * r * r / 6.0, (3.0 * s3 - 6.0 * s2 + 4.0) / 6.0, (-3.0 * s3 + 3.0 * s2 + 3.0 * s + 1.0) / 6.0,
            s3 / 6.0};
}

Stencil x2_stencil(const Grid& g, double x2, Interpolation method = Interpolation::Lagrange) {
    const double u = x2 / g.h2();
    const double cell = std::floor(u);
    const double s = u - cell;
    return {static_cast<int>(cell) - 1,
            method == Interpolation::PeriodicSplineX2 ? bspline_weights(s) : cubic_weights(s)};
}

int wrap(int m, int n) {
    m %= n;
    return m < 0 ? m + n : m;
}

double apply(const Field& f, const Stencil& s1, const Stencil& s2) {
    const int n2 = f.grid().n2();
    std::array<int, 4> cols;
    for (int b = 0; b < 4; ++b) cols[b] = wrap(s2.first + b, n2);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int j = s1.first + a;
        double row = 0.0;
        for (int b = 0; b < 4; ++b) row += s2.w[b] * f(j, cols[b]);
        acc += s1.w[a] * row;
    }
    return acc;
}

}  // namespace

void StepperConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ParameterError("cfl_safety must lie in (0, 1]");
}

double interpolate(const Field& f, double x1, double x2) {
    const Grid& g = f.grid();
    return apply(f, x1_stencil(g, x1), x2_stencil(g, x2));
}

Transport::Transport(const Grid& grid, const Params& params) : plan_(grid), params_(params) {
    if (std::abs(grid.box() - params.box()) > 1e-12 * params.box())
        throw ParameterError("grid box and parameter box differ");
}

ElectricField Transport::field_of(const PlasmaState& state) const {
    return plan_.electric_field(plan_.solve_potential(net_charge(state)));
}

SpeciesVelocities Transport::velocity_fields(const PlasmaState& state) const {
    VectorField drift = perp(field_of(state));
    VectorField plus = drift;
    plus.a2 += -params_.t_plus();
    VectorField minus = std::move(drift);
    minus.a2 += -params_.t_minus();
    return {std::move(plus), std::move(minus)};
}

double Transport::cfl_bound(const ElectricField& e, const StepperConfig& cfg) const {
    // |U+-| components: |E2| and |E1 + T+-|, maximised over both species.
    double speed = kSpeedFloor;
    for (std::size_t i = 0; i < e.e1.size(); ++i) {
        speed = std::max({speed, std::abs(e.e2[i]), std::abs(e.e1[i] + params_.t_plus()),
                          std::abs(e.e1[i] + params_.t_minus())});
    }
    return cfg.cfl_safety * std::min(grid().h1(), grid().h2()) / speed;
}

double Transport::cfl_dt(const PlasmaState& state, const StepperConfig& cfg) const {
    return cfl_bound(field_of(state), cfg);
}

Field Transport::prepare(const Field& f, Interpolation method) const {
    if (method == Interpolation::Lagrange) return f;
    // Interpolating spline: divide the x2 spectrum by the B-spline symbol.
    const int n2 = grid().n2();
    const double pi = std::numbers::pi;
    std::vector<std::complex<double>> symbol(n2 / 2 + 1);
    for (int q = 0; q <= n2 / 2; ++q) symbol[q] = 6.0 / (4.0 + 2.0 * std::cos(2.0 * pi * q / n2));
    return plan_.apply_x2_symbol(f, symbol);
}

// Backward characteristics under U = (E2, -E1 - T) with the supplied field
// held fixed over the step: midpoint rule, velocities interpolated like the
// densities.
PlasmaState Transport::advect(const PlasmaState& state, const ElectricField& e, double dt,
                              Interpolation method) const {
    const Grid& g = grid();
    const double box = g.box();
    const double h1 = g.h1();
    PlasmaState next{Field(g), Field(g), state.time + dt};
    const Field e1 = prepare(e.e1, method);
    const Field e2 = prepare(e.e2, method);

    auto trace = [&](const Field& rho, double temperature, Field& out) {
        const Field coeffs = prepare(rho, method);
        for (int j = 0; j < g.n1(); ++j) {
            for (int m = 0; m < g.n2(); ++m) {
                const double x1 = g.x1(j);
                const double x2 = g.x2(m);
                // Nodal velocity needs no interpolation.
                const double u1 = e.e2(j, m);
                const double u2 = -e.e1(j, m) - temperature;
                const double mid1 = std::clamp(x1 - 0.5 * dt * u1, 0.0, box);
                const double mid2 = x2 - 0.5 * dt * u2;
                const Stencil s1 = x1_stencil(g, mid1);
                const Stencil s2 = x2_stencil(g, mid2, method);
                const double v1 = apply(e2, s1, s2);
                const double v2 = -apply(e1, s1, s2) - temperature;
                double foot1 = x1 - dt * v1;
                const double foot2 = x2 - dt * v2;
                if (foot1 < -h1 || foot1 > box + h1) {
                    std::ostringstream msg;
                    msg << "characteristic foot x1=" << foot1 << " left the slab at node (" << j << ", " << m
                        << ")";
                    throw ConsistencyError(msg.str());
                }
                foot1 = std::clamp(foot1, 0.0, box);
                const double value = apply(coeffs, x1_stencil(g, foot1), x2_stencil(g, foot2, method));
                out(j, m) = std::max(value, kDensityFloor);
            }
        }
    };
    trace(state.rho_plus, params_.t_plus(), next.rho_plus);
    trace(state.rho_minus, params_.t_minus(), next.rho_minus);
    return next;
}

PlasmaState Transport::step(const PlasmaState& state, const StepperConfig& cfg) const {
    cfg.validate();
    if (!(state.rho_plus.grid() == grid()) || !(state.rho_minus.grid() == grid()))
        throw SizingError("state grid does not match transport grid");
    return step_with(state, field_of(state), cfg);
}

PlasmaState Transport::step_with(const PlasmaState& state, const ElectricField& e,
                                 const StepperConfig& cfg) const {
    const double bound = cfl_bound(e, cfg);
    if (cfg.dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt=" << cfg.dt << " exceeds CFL bound " << bound;
        throw CflError(msg.str());
    }

    PlasmaState next = advect(state, e, cfg.dt, cfg.interpolation);
    if (cfg.coupling == Coupling::PredictorCorrector) {
        ElectricField centred = field_of(next);
        centred.e1 += e.e1;
        centred.e1 *= 0.5;
        centred.e2 += e.e2;
        centred.e2 *= 0.5;
        next = advect(state, centred, cfg.dt, cfg.interpolation);
    }
    if (!next.rho_plus.all_finite() || !next.rho_minus.all_finite())
        throw ConsistencyError("non-finite density after step");
    return next;
}

PlasmaState Transport::run(PlasmaState state, const StepperConfig& cfg, double t_end,
                           const std::vector<Observer>& observers) const {
    cfg.validate();
    if (t_end < state.time) throw ParameterError("t_end precedes the state time");
    long steps = 0;
    for (const auto& obs : observers) obs(state, steps);
    // Relative slack so round-off in accumulated time never produces a
    // vanishing final step.
    const double slack = 1e-12 * std::max(1.0, std::abs(t_end));
    while (t_end - state.time > slack) {
        const ElectricField e = field_of(state);
        StepperConfig local = cfg;
        local.dt = std::min({cfg.dt, cfl_bound(e, cfg), t_end - state.time});
        state = step_with(state, e, local);
        ++steps;
        if (t_end - state.time <= slack) state.time = t_end;
        for (const auto& obs : observers) obs(state, steps);
    }
    return state;
}

}  // namespace plasma_lab
