#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plasma_lab/core.hpp"
#include "plasma_lab/poisson.hpp"

namespace plasma_lab {

/// Deviation norms and energy functionals of a state about a steady profile.
struct EnergyRecord {
    double time = 0.0;
    double dev_plus = 0.0;   // |rho+ - mu+|_L2
    double dev_minus = 0.0;  // |rho- - mu-|_L2
    double elec = 0.0;       // integral of |grad V|^2
    double e_good = 0.0;     // dev^2 + energy_weight * elec
    double f_bad = 0.0;      // dev^2 - energy_weight * elec
    double gap = 0.0;        // dev_plus^2 - dev_minus^2
    double mass = 0.0;

    double dev_squared() const { return dev_plus * dev_plus + dev_minus * dev_minus; }
    double dev() const;
};

/// 2 / (L (T+ - T-)): the weight of the field energy in the conserved
/// functionals of the good and bad sides.
double energy_weight(const Params& params);

EnergyRecord record(const PlasmaState& state, const Params& params, SteadyKind reference);
/// Same, reusing a plan built for the state's grid.
EnergyRecord record(const PlasmaState& state, const Params& params, SteadyKind reference,
                    const SpectralPlan& plan);

/// elec <= (L^2 / pi^2) |rho+ + rho- - 1|^2 <= 2 (L^2 / pi^2) dev^2, with a
/// relative slack for rounding.
bool poincare_chain_holds(const EnergyRecord& r, double charge_norm_squared, const Params& params);

/// int E2 (rho+ - mu+) + int E2 (rho- - mu-), which vanishes for the exact
/// dynamics.
double cross_term_residual(const PlasmaState& state, SteadyKind reference, const SpectralPlan& plan);

struct TemperatureField {
    Field temperature;
    /// Nodes where rho+ + rho- <= 1e-12; their sample is set to (T+ + T-) / 2.
    std::vector<std::size_t> vacuum_nodes;
};

/// (rho+ T+ + rho- T-) / (rho+ + rho-) at every node.
TemperatureField temperature_field(const PlasmaState& state, const Params& params);

struct GrowthFit {
    double rate = 0.0;
    double quality = 0.0;  // coefficient of determination of the log fit
    std::size_t samples = 0;
};

/// Least-squares slope of log(value) against time over samples with
/// t_begin <= t <= t_end. Needs at least 8 strictly positive samples in the
/// window; throws ParameterError otherwise.
GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> values, double t_begin,
                          double t_end);

/// Ordinary least squares of y on x, used for affine scaling checks.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace plasma_lab
