#include "plasma_lab/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace plasma_lab {

double EnergyRecord::dev() const { return std::sqrt(dev_squared()); }

double energy_weight(const Params& params) { return 2.0 / (params.box() * (params.t_plus() - params.t_minus())); }

EnergyRecord record(const PlasmaState& state, const Params& params, SteadyKind reference) {
    return record(state, params, reference, SpectralPlan(state.grid()));
}

EnergyRecord record(const PlasmaState& state, const Params& params, SteadyKind reference,
                    const SpectralPlan& plan) {
    const PlasmaState mu = steady_state(reference, state.grid());
    EnergyRecord r;
    r.time = state.time;
    r.dev_plus = l2_norm(state.rho_plus - mu.rho_plus);
    r.dev_minus = l2_norm(state.rho_minus - mu.rho_minus);
    r.elec = field_energy(plan.electric_field(plan.solve_potential(net_charge(state))));
    const double weight = energy_weight(params);
    r.e_good = r.dev_squared() + weight * r.elec;
    r.f_bad = r.dev_squared() - weight * r.elec;
    r.gap = r.dev_plus * r.dev_plus - r.dev_minus * r.dev_minus;
    r.mass = total_mass(state);
    return r;
}

bool poincare_chain_holds(const EnergyRecord& r, double charge_norm_squared, const Params& params) {
    const double c = params.box() * params.box() / (std::numbers::pi * std::numbers::pi);
    const double slack = 1.0 + 1e-10;
    return r.elec <= c * charge_norm_squared * slack + 1e-300 &&
           charge_norm_squared <= 2.0 * r.dev_squared() * slack + 1e-300;
}

double cross_term_residual(const PlasmaState& state, SteadyKind reference, const SpectralPlan& plan) {
    const PlasmaState mu = steady_state(reference, state.grid());
    const ElectricField e = plan.electric_field(plan.solve_potential(net_charge(state)));
    return inner(e.e2, state.rho_plus - mu.rho_plus) + inner(e.e2, state.rho_minus - mu.rho_minus);
}

TemperatureField temperature_field(const PlasmaState& state, const Params& params) {
    TemperatureField out{Field(state.grid()), {}};
    for (std::size_t i = 0; i < out.temperature.size(); ++i) {
        const double p = state.rho_plus[i];
        const double m = state.rho_minus[i];
        const double total = p + m;
        if (total <= 1e-12) {
            out.vacuum_nodes.push_back(i);
            out.temperature[i] = 0.5 * (params.t_plus() + params.t_minus());
        } else {
            out.temperature[i] = (p * params.t_plus() + m * params.t_minus()) / total;
        }
    }
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw ParameterError("line fit needs two or more paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ParameterError("line fit needs distinct abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    // A flat series is fitted exactly by a zero slope.
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> values, double t_begin,
                          double t_end) {
    if (times.size() != values.size()) throw ParameterError("time and value series differ in length");
    std::vector<double> t, logv;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_begin || times[i] > t_end) continue;
        if (!(values[i] > 0.0)) {
            std::ostringstream msg;
            msg << "non-positive value " << values[i] << " at t=" << times[i] << " inside the fit window";
            throw ParameterError(msg.str());
        }
        t.push_back(times[i]);
        logv.push_back(std::log(values[i]));
    }
    if (t.size() < 8) {
        std::ostringstream msg;
        msg << "growth fit window [" << t_begin << ", " << t_end << "] holds " << t.size()
            << " samples, need at least 8";
        throw ParameterError(msg.str());
    }
    const LinearFit line = fit_line(t, logv);
    return {line.slope, line.r_squared, t.size()};
}

}  // namespace plasma_lab
