#include "plasma_lab/drifts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plasma_lab {

bool ParticleState::finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(v1) && std::isfinite(v2);
}

ParticleState drift_rhs(const ParticleState& p) {
    const double lever = p.v2 - p.x1;
    return {-p.v1 * lever, -p.v2 * lever - 0.5 * (p.v1 * p.v1 + p.v2 * p.v2), p.v2 * lever, -p.v1 * lever};
}

namespace {

ParticleState axpy(const ParticleState& p, double a, const ParticleState& d) {
    return {p.x1 + a * d.x1, p.x2 + a * d.x2, p.v1 + a * d.v1, p.v2 + a * d.v2};
}

ParticleState rk4(const ParticleState& p, double dt) {
    const ParticleState k1 = drift_rhs(p);
    const ParticleState k2 = drift_rhs(axpy(p, 0.5 * dt, k1));
    const ParticleState k3 = drift_rhs(axpy(p, 0.5 * dt, k2));
    const ParticleState k4 = drift_rhs(axpy(p, dt, k3));
    const double w = dt / 6.0;
    return {p.x1 + w * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
            p.x2 + w * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2),
            p.v1 + w * (k1.v1 + 2.0 * k2.v1 + 2.0 * k3.v1 + k4.v1),
            p.v2 + w * (k1.v2 + 2.0 * k2.v2 + 2.0 * k3.v2 + k4.v2)};
}

}  // namespace

Trajectory integrate_orbit(const ParticleState& p0, double dt, long steps, long decimate) {
    if (!(dt > 0.0)) throw ParameterError("orbit dt must be positive");
    if (steps < 1) throw ParameterError("orbit needs at least one step");
    if (decimate < 1) throw ParameterError("decimation must be >= 1");
    if (!p0.finite()) throw ParameterError("initial particle state is not finite");

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(p0);
    ParticleState p = p0;
    for (long n = 1; n <= steps; ++n) {
        p = rk4(p, dt);
        if (!p.finite()) {
            std::ostringstream msg;
            msg << "orbit became non-finite at step " << n;
            throw ConsistencyError(msg.str());
        }
        if (n % decimate == 0 || n == steps) {
            traj.times.push_back(n * dt);
            traj.states.push_back(p);
        }
    }
    return traj;
}

ParticleState closed_form_orbit(const ParticleState& p0, double t) {
    const double c1 = p0.x1 - p0.v2;
    const double c2 = p0.v1 * p0.v1 + p0.v2 * p0.v2;
    const double c = std::cos(c1 * t);
    const double s = std::sin(c1 * t);
    ParticleState p;
    p.v1 = c * p0.v1 - s * p0.v2;
    p.v2 = s * p0.v1 + c * p0.v2;
    p.x1 = p.v2 + c1;
    p.x2 = p0.x2 + p0.v1 - p.v1 - 0.5 * c2 * t;
    return p;
}

OrbitResiduals orbit_invariants(const Trajectory& traj) {
    if (traj.states.empty() || traj.states.size() != traj.times.size())
        throw ParameterError("trajectory is empty or inconsistent");
    const ParticleState& p0 = traj.states.front();
    const double c1 = p0.x1 - p0.v2;
    const double c2 = p0.v1 * p0.v1 + p0.v2 * p0.v2;
    const double fall0 = p0.x2 + p0.v1;
    const double t0 = traj.times.front();
    OrbitResiduals r;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const ParticleState& p = traj.states[i];
        const double t = traj.times[i] - t0;
        r.c1_drift = std::max(r.c1_drift, std::abs(p.x1 - p.v2 - c1));
        r.c2_drift = std::max(r.c2_drift, std::abs(p.v1 * p.v1 + p.v2 * p.v2 - c2));
        r.fall_drift = std::max(r.fall_drift, std::abs(p.x2 + p.v1 + 0.5 * c2 * t - fall0));
    }
    return r;
}

double fitted_fall_rate(const Trajectory& traj) {
    const std::size_t n = traj.times.size();
    if (n < 2) throw ParameterError("fall-rate fit needs at least two samples");
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += traj.times[i];
        my += traj.states[i].x2 + traj.states[i].v1;
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = traj.times[i] - mt;
        stt += dt * dt;
        sty += dt * (traj.states[i].x2 + traj.states[i].v1 - my);
    }
    return sty / stt;
}

}  // namespace plasma_lab
