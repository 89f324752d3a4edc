#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plasma_lab/linmodes.hpp"
#include "plasma_lab/transport.hpp"

using namespace plasma_lab;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Field& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double state_distance(const PlasmaState& a, const PlasmaState& b) {
    const Field dp = a.rho_plus - b.rho_plus;
    const Field dm = a.rho_minus - b.rho_minus;
    return std::sqrt(inner(dp, dp) + inner(dm, dm));
}

const Params kAcceptance = Params(0.01 + 2.0 / (5 * kPi * kPi), 0.01, 1.0);

PlasmaState seeded(const Grid& g, double amplitude) {
    const ModeAnalysis a = analyze_mode({1, 1}, kAcceptance, SteadyKind::BadCurvature);
    return superpose(steady_state(SteadyKind::BadCurvature, g), eigenmode_fields(a, amplitude, g));
}

}  // namespace

TEST_CASE("stepper config validation") {
    StepperConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.dt = 0.1;
    cfg.cfl_safety = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.cfl_safety = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("velocity fields") {
    const Grid g = make_grid(17, 16, 1.0);
    const Params p(0.3, 0.1, 1.0);
    const Transport tr(g, p);

    const SpeciesVelocities mu = tr.velocity_fields(steady_state(SteadyKind::BadCurvature, g));
    CHECK(max_abs(mu.plus.a1) <= 1e-15);
    CHECK(max_abs(mu.plus.a2 + Field(g, 0.3)) <= 1e-15);
    CHECK(max_abs(mu.minus.a2 + Field(g, 0.1)) <= 1e-15);

    const PlasmaState s = superpose(steady_state(SteadyKind::BadCurvature, g), smooth_perturbation(g, 0.05, 3, 4));
    const SpeciesVelocities u = tr.velocity_fields(s);
    CHECK(max_abs(u.plus.a1 - u.minus.a1) == 0.0);
    CHECK(max_abs(u.plus.a2 - u.minus.a2 - Field(g, -0.2)) <= 1e-15);
    CHECK(max_abs(u.plus.a1) > 1e-6);
    CHECK(max_abs(tr.plan().divergence(u.plus)) <= 1e-10);
    CHECK(max_abs(tr.plan().divergence(u.minus)) <= 1e-10);
}

TEST_CASE("CFL time step") {
    const Params p(0.1, 0.05, 1.0);
    StepperConfig cfg;
    cfg.cfl_safety = 0.5;
    const Grid g64 = make_grid(65, 64, 1.0);
    const double dt64 = Transport(g64, p).cfl_dt(steady_state(SteadyKind::BadCurvature, g64), cfg);
    CHECK(dt64 == doctest::Approx(0.078125).epsilon(1e-12));

    const Grid g128 = make_grid(129, 128, 1.0);
    const double dt128 = Transport(g128, p).cfl_dt(steady_state(SteadyKind::BadCurvature, g128), cfg);
    CHECK(dt128 == doctest::Approx(dt64 / 2).epsilon(1e-12));
}

TEST_CASE("step rejects CFL violations") {
    const Grid g = make_grid(17, 16, 1.0);
    const Transport tr(g, Params(0.1, 0.05, 1.0));
    const PlasmaState mu = steady_state(SteadyKind::BadCurvature, g);
    StepperConfig cfg;
    cfg.dt = 2 * tr.cfl_dt(mu, cfg);
    CHECK_THROWS_AS(tr.step(mu, cfg), CflError);
    cfg.dt = tr.cfl_dt(mu, cfg);
    CHECK_NOTHROW(tr.step(mu, cfg));
}

TEST_CASE("steady states are fixed points") {
    const Grid g = make_grid(17, 16, 1.0);
    const Params p(0.3, 0.1, 1.0);
    const Transport tr(g, p);
    for (SteadyKind kind : {SteadyKind::BadCurvature, SteadyKind::GoodCurvature}) {
        const PlasmaState mu = steady_state(kind, g);
        StepperConfig cfg;
        cfg.dt = tr.cfl_dt(mu, cfg);
        const PlasmaState one = tr.step(mu, cfg);
        CHECK(one.time == doctest::Approx(cfg.dt));
        CHECK(state_distance(one, mu) <= 1e-14);

        long count = 0;
        const PlasmaState far = tr.run(mu, cfg, 1e4 * cfg.dt * (1 - 1e-9), {[&](const PlasmaState&, long) { ++count; }});
        CHECK(count == 10001);
        CHECK(state_distance(far, mu) <= 1e-8);
    }

    const Grid g32 = make_grid(33, 32, 1.0);
    const Transport t32(g32, p);
    const PlasmaState mu = steady_state(SteadyKind::BadCurvature, g32);
    CHECK(state_distance(t32.run(mu, StepperConfig{}, 10.0), mu) <= 1e-9);
}

TEST_CASE("charge-neutral shear is a pure drift along x2") {
    const Grid g = make_grid(33, 32, 1.0);
    const Params p(0.3, 0.1, 1.0);
    auto profile = [](double shift) {
        return [shift](double x1, double x2) { return 0.1 * std::sin(kPi * x1) * std::cos(2 * kPi * (x2 + shift)); };
    };
    const PlasmaState s{Field::sample(g, profile(0.0)) + Field(g, 0.5),
                        Field(g, 0.5) - Field::sample(g, profile(0.0)), 0.0};
    const Transport tr(g, p);
    CHECK(max_abs(tr.field_of(s).e1) <= 1e-14);

    for (Interpolation method : {Interpolation::Lagrange, Interpolation::PeriodicSplineX2}) {
        StepperConfig cfg;
        cfg.interpolation = method;
        cfg.dt = 0.05;
        const PlasmaState next = tr.step(s, cfg);
        const Field expect_plus = Field::sample(g, profile(0.3 * 0.05)) + Field(g, 0.5);
        const Field expect_minus = Field(g, 0.5) - Field::sample(g, profile(0.1 * 0.05));
        CHECK(max_abs(next.rho_plus - expect_plus) <= 2e-5);
        CHECK(max_abs(next.rho_minus - expect_minus) <= 2e-5);
    }
}

TEST_CASE("one small step matches the linearised right-hand side") {
    const Grid g = make_grid(129, 128, 1.0);
    const Transport tr(g, kAcceptance);
    const ModeAnalysis a = analyze_mode({1, 1}, kAcceptance, SteadyKind::BadCurvature);
    const double delta = 1e-6;
    const PlasmaState pert = eigenmode_fields(a, delta, g);
    const PlasmaState s = superpose(steady_state(SteadyKind::BadCurvature, g), pert);

    // The seed is kappa Re(h g) for the eigenvector h, so its time derivative
    // is kappa Re(lambda h g).
    auto mode = [&](Complex h) {
        return Field::sample(g, [&](double x1, double x2) {
            return std::sin(kPi * x1) * (h * std::polar(1.0, 2 * kPi * x2)).real();
        });
    };
    const Field up = mode(a.eigenvector[0]);
    const Field um = mode(a.eigenvector[1]);
    const double kappa = delta / std::sqrt(inner(up, up) + inner(um, um));
    const Field expect_plus = kappa * mode(a.eigenvalues[0] * a.eigenvector[0]);
    const Field expect_minus = kappa * mode(a.eigenvalues[0] * a.eigenvector[1]);
    CHECK(max_abs(kappa * up - pert.rho_plus) <= 1e-20);

    for (Coupling c : {Coupling::Frozen, Coupling::PredictorCorrector}) {
        StepperConfig cfg;
        cfg.dt = 1e-4;
        cfg.coupling = c;
        const PlasmaState next = tr.step(s, cfg);
        const Field rate_plus = (1.0 / cfg.dt) * (next.rho_plus - s.rho_plus);
        const Field rate_minus = (1.0 / cfg.dt) * (next.rho_minus - s.rho_minus);
        const double ref = std::sqrt(inner(expect_plus, expect_plus) + inner(expect_minus, expect_minus));
        const Field ep = rate_plus - expect_plus;
        const Field em = rate_minus - expect_minus;
        const double err = std::sqrt(inner(ep, ep) + inner(em, em));
        CHECK(err <= 1e-4 * ref);
    }
}

TEST_CASE("run semantics") {
    const Grid g = make_grid(17, 16, 1.0);
    const Transport tr(g, kAcceptance);
    const PlasmaState s = seeded(g, 1e-3);

    int fired = 0;
    const PlasmaState same = tr.run(s, StepperConfig{}, s.time, {[&](const PlasmaState&, long n) {
                                        CHECK(n == 0);
                                        ++fired;
                                    }});
    CHECK(fired == 1);
    CHECK(state_distance(same, s) == 0.0);

    std::vector<double> times;
    StepperConfig cfg;
    cfg.dt = 0.3;
    const PlasmaState end = tr.run(s, cfg, 1.0, {[&](const PlasmaState& st, long) { times.push_back(st.time); }});
    CHECK(end.time == 1.0);
    REQUIRE(times.size() >= 5);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == 1.0);
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] - times[i - 1] <= 0.3 + 1e-12);

    CHECK_THROWS_AS(tr.run(end, cfg, 0.5), ParameterError);
}

TEST_CASE("x2 translation equivariance for whole-cell shifts") {
    const Grid g = make_grid(33, 32, 1.0);
    const Transport tr(g, kAcceptance);
    const PlasmaState s = superpose(steady_state(SteadyKind::BadCurvature, g), smooth_perturbation(g, 0.05, 3, 9));
    const int shift = 5;
    auto shifted = [&](const Field& f) {
        Field out(g);
        for (int j = 0; j < g.n1(); ++j)
            for (int m = 0; m < g.n2(); ++m) out(j, m) = f(j, (m + shift) % g.n2());
        return out;
    };
    const PlasmaState t{shifted(s.rho_plus), shifted(s.rho_minus), 0.0};
    StepperConfig cfg;
    cfg.dt = 0.05;
    const PlasmaState a = tr.run(s, cfg, 1.0);
    const PlasmaState b = tr.run(t, cfg, 1.0);
    CHECK(max_abs(shifted(a.rho_plus) - b.rho_plus) <= 1e-12);
    CHECK(max_abs(shifted(a.rho_minus) - b.rho_minus) <= 1e-12);
}

TEST_CASE("densities stay within their initial bounds") {
    const Grid g = make_grid(33, 32, 1.0);
    const Params p = Params::from_gradient(0.01, 1.0, 0.2);
    const Transport tr(g, p);
    const PlasmaState s = superpose(steady_state(SteadyKind::BadCurvature, g), smooth_perturbation(g, 0.05, 2, 3));
    double low = 0.0, high = 0.0;
    const PlasmaState end = tr.run(s, StepperConfig{}, 5.0, {[&](const PlasmaState& st, long) {
                                       low = std::min({low, st.rho_plus.min(), st.rho_minus.min()});
                                       high = std::max({high, st.rho_plus.max(), st.rho_minus.max()});
                                   }});
    CHECK(end.rho_plus.all_finite());
    CHECK(low >= kDensityFloor);
    CHECK(high <= std::max(s.rho_plus.max(), s.rho_minus.max()) + 1e-2);
}

TEST_CASE("mass drift shrinks under refinement") {
    const Params p = Params::from_gradient(0.01, 1.0, 0.2);
    auto drift = [&](int n) {
        const Grid g = make_grid(n + 1, n, 1.0);
        const Transport tr(g, p);
        const PlasmaState s = superpose(steady_state(SteadyKind::BadCurvature, g), smooth_perturbation(g, 0.05, 2, 3));
        const double m0 = total_mass(s);
        double worst = 0.0;
        tr.run(s, StepperConfig{}, 4.0, {[&](const PlasmaState& st, long) {
                   worst = std::max(worst, std::abs(total_mass(st) - m0));
               }});
        return worst;
    };
    const double coarse = drift(32);
    const double fine = drift(64);
    MESSAGE("mass drift 32: " << coarse << ", 64: " << fine);
    CHECK(fine < coarse);
    CHECK(coarse / fine >= 3.5);
}

TEST_CASE("predictor-corrector is second order in time, frozen coupling first order") {
    const Grid g = make_grid(33, 32, 1.0);
    const Transport tr(g, kAcceptance);
    const PlasmaState s = seeded(g, 0.05);
    auto solve = [&](Coupling c, double dt) {
        StepperConfig cfg;
        cfg.coupling = c;
        cfg.dt = dt;
        cfg.cfl_safety = 1.0;
        return tr.run(s, cfg, 2.0);
    };
    for (Coupling c : {Coupling::Frozen, Coupling::PredictorCorrector}) {
        const PlasmaState a = solve(c, 0.2);
        const PlasmaState b = solve(c, 0.1);
        const PlasmaState r = solve(c, 0.05);
        const double ratio = state_distance(a, b) / state_distance(b, r);
        MESSAGE("coupling " << static_cast<int>(c) << " ratio " << ratio);
        if (c == Coupling::Frozen) {
            CHECK(ratio > 1.6);
            CHECK(ratio < 2.8);
        } else {
            CHECK(ratio > 3.0);
        }
    }
}

TEST_CASE("point interpolation") {
    const Grid g = make_grid(33, 32, 1.0);
    const Field cubic = Field::sample(g, [](double x1, double) { return x1 * x1 * x1 - 2 * x1; });
    CHECK(interpolate(cubic, 0.013, 0.4) == doctest::Approx(0.013 * 0.013 * 0.013 - 0.026).epsilon(1e-13));
    CHECK(interpolate(cubic, 0.999, 0.4) == doctest::Approx(0.999 * 0.999 * 0.999 - 1.998).epsilon(1e-13));
    const Field wave = Field::sample(g, [](double, double x2) { return std::cos(2 * kPi * x2); });
    CHECK(interpolate(wave, 0.5, 1.0 + 1.0 / 32) == doctest::Approx(std::cos(2 * kPi / 32)).epsilon(1e-14));
    CHECK(interpolate(wave, 0.5, -0.25) == doctest::Approx(0.0).scale(1e-4));
}
