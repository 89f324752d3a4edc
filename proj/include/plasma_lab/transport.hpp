#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "plasma_lab/core.hpp"
#include "plasma_lab/poisson.hpp"

namespace plasma_lab {

/// How the self-consistent field enters a semi-Lagrangian step.
enum class Coupling {
    /// Velocity frozen at time t for the whole step (first order in dt).
    Frozen,
    /// Frozen predictor, then a retrace with the time-centred velocity
    /// (U(t) + U*(t+dt)) / 2 (second order in dt).
    PredictorCorrector,
};

/// Interpolation at characteristic feet. Both are cubic along each axis and
/// use one-sided Lagrange stencils along x1 at the walls.
enum class Interpolation {
    /// 4-point Lagrange along both axes.
    Lagrange,
    /// 4-point Lagrange along x1, periodic cubic spline along x2.
    PeriodicSplineX2,
};

struct StepperConfig {
    double dt = 1e-2;
    double cfl_safety = 0.5;
    Coupling coupling = Coupling::PredictorCorrector;
    Interpolation interpolation = Interpolation::PeriodicSplineX2;

    void validate() const;
};

/// Advecting velocities U+- = E_perp - T+- e2.
struct SpeciesVelocities {
    VectorField plus;
    VectorField minus;
};

/// Lower clamp applied to densities after interpolation.
inline constexpr double kDensityFloor = -1e-12;

class Transport {
public:
    Transport(const Grid& grid, const Params& params);

    const Grid& grid() const { return plan_.grid(); }
    const Params& params() const { return params_; }
    const SpectralPlan& plan() const { return plan_; }

    ElectricField field_of(const PlasmaState& state) const;
    SpeciesVelocities velocity_fields(const PlasmaState& state) const;

    /// cfl_safety * min(h1, h2) / max(|U+|_inf, |U-|_inf, 1e-12).
    double cfl_dt(const PlasmaState& state, const StepperConfig& cfg) const;

    /// One step of length cfg.dt. Throws CflError when cfg.dt exceeds the
    /// CFL bound of the current state.
    PlasmaState step(const PlasmaState& state, const StepperConfig& cfg) const;

    /// Called with the state and the number of steps taken so far.
    using Observer = std::function<void(const PlasmaState&, long)>;

    /// Steps with dt = min(cfg.dt, cfl_dt, t_end - t) until t_end. Every
    /// observer fires on the initial state and after every step.
    PlasmaState run(PlasmaState state, const StepperConfig& cfg, double t_end,
                    const std::vector<Observer>& observers = {}) const;

private:
    double cfl_bound(const ElectricField& e, const StepperConfig& cfg) const;
    PlasmaState step_with(const PlasmaState& state, const ElectricField& e, const StepperConfig& cfg) const;
    PlasmaState advect(const PlasmaState& state, const ElectricField& e, double dt,
                       Interpolation method) const;
    /// Field prepared for interpolation: spline coefficients along x2 for
    /// PeriodicSplineX2, the samples themselves otherwise.
    Field prepare(const Field& f, Interpolation method) const;

    SpectralPlan plan_;
    Params params_;
};

/// Lagrange-cubic interpolation of a grid field at an arbitrary point. x2 is
/// wrapped periodically; in x1 the 4-point stencil is shifted inwards near
/// the walls. x1 must lie in [0, L].
double interpolate(const Field& f, double x1, double x2);

}  // namespace plasma_lab
