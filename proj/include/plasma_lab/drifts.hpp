#pragma once

#include <vector>

#include "plasma_lab/core.hpp"

namespace plasma_lab {

/// Guiding-centre position and velocity in the field-free drift system.
struct ParticleState {
    double x1 = 0.0;
    double x2 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;

    bool finite() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ParticleState> states;
};

/// dx/dt = (-v1 (v2 - x1), v2 (x1 - v2) - |v|^2 / 2),
/// dv/dt = (v2 (v2 - x1), -v1 (v2 - x1)).
ParticleState drift_rhs(const ParticleState& p);

/// Classical RK4 with fixed dt. Stores t = 0, then every `decimate`-th step,
/// and always the final step. Throws ConsistencyError naming the step index
/// if the state stops being finite.
Trajectory integrate_orbit(const ParticleState& p0, double dt, long steps, long decimate = 1);

/// Exact solution: x1 - v2 = C1 is conserved, v rotates at angular rate C1,
/// and x2 + v1 falls at rate |v|^2 / 2.
ParticleState closed_form_orbit(const ParticleState& p0, double t);

struct OrbitResiduals {
    double c1_drift = 0.0;    // max |(x1 - v2) - C1|
    double c2_drift = 0.0;    // max ||v|^2 - C2|
    double fall_drift = 0.0;  // max |x2 + v1 + C2 t / 2 - (x2 + v1)(0)|
};

OrbitResiduals orbit_invariants(const Trajectory& traj);

/// Least-squares slope of x2 + v1 against time.
double fitted_fall_rate(const Trajectory& traj);

}  // namespace plasma_lab
