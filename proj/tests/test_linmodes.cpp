#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "plasma_lab/linmodes.hpp"
#include "plasma_lab/poisson.hpp"

using namespace plasma_lab;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd to_eigen(const Matrix2& m) {
    Eigen::Matrix2cd out;
    out << m[0][0], m[0][1], m[1][0], m[1][1];
    return out;
}

// Generator i B solved densely, sorted by decreasing real part.
std::array<Complex, 2> dense_eigenvalues(const Matrix2& b) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(Complex(0, 1) * to_eigen(b));
    std::array<Complex, 2> ev{solver.eigenvalues()[0], solver.eigenvalues()[1]};
    if (ev[1].real() > ev[0].real()) std::swap(ev[0], ev[1]);
    return ev;
}

// Equal real parts make the ordering ambiguous, so compare as unordered pairs.
bool same_spectrum(const std::array<Complex, 2>& a, const std::array<Complex, 2>& b, double rel) {
    const double tol = rel * std::max(std::abs(b[0]), std::abs(b[1]));
    const bool direct = std::abs(a[0] - b[0]) <= tol && std::abs(a[1] - b[1]) <= tol;
    const bool swapped = std::abs(a[0] - b[1]) <= tol && std::abs(a[1] - b[0]) <= tol;
    return direct || swapped;
}

const Params kAcceptance = Params(0.01 + 2.0 / (5 * kPi * kPi), 0.01, 1.0);

}  // namespace

TEST_CASE("mode index validation") {
    CHECK_NOTHROW((ModeIndex{1, -3}).validate());
    CHECK_THROWS_AS((ModeIndex{0, 1}).validate(), ParameterError);
    CHECK_THROWS_AS((ModeIndex{1, 0}).validate(), ParameterError);
    CHECK_THROWS_AS(mode_matrix({1, 0}, kAcceptance, SteadyKind::BadCurvature), ParameterError);
}

TEST_CASE("mode thresholds") {
    CHECK(std::abs(mode_threshold({1, 1}) - 4.0 / (5 * kPi * kPi)) <= 1e-15);
    CHECK(mode_threshold({1, 1}) == doctest::Approx(0.0810569).epsilon(1e-6));
    CHECK(std::abs(mode_threshold({1, 2}) - 4.0 / (17 * kPi * kPi)) <= 1e-15);
    CHECK(mode_threshold({1, 2}) == doctest::Approx(0.0238402).epsilon(1e-5));

    double best = 0.0;
    int hits = 0;
    for (int k1 = 1; k1 <= 12; ++k1)
        for (int k2 = -12; k2 <= 12; ++k2) {
            if (k2 == 0) continue;
            const double t = mode_threshold({k1, k2});
            if (t > best + 1e-15) {
                best = t;
                hits = 0;
            }
            if (std::abs(t - best) <= 1e-15) ++hits;
        }
    CHECK(best == mode_threshold({1, 1}));
    CHECK(hits == 2);  // (1, 1) and (1, -1)
}

TEST_CASE("discriminant examples") {
    const Params at = Params(0.01 + 4.0 / (5 * kPi * kPi), 0.01, 1.0);
    CHECK(std::abs(discriminant({1, 1}, at, SteadyKind::BadCurvature)) <= 1e-15);

    const double d = discriminant({1, 1}, kAcceptance, SteadyKind::BadCurvature);
    CHECK(d == doctest::Approx(16.0 / (25 * kPi * kPi)).epsilon(1e-13));
    CHECK(d == doctest::Approx(0.06485).epsilon(1e-4));

    // -L^2 disc(B) cross-check for assorted boxes and modes.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Params p(u(rng) + 1.0, u(rng), 0.5 + 2 * u(rng));
        const ModeIndex k{1 + trial % 4, (trial % 7) - 3 == 0 ? 2 : (trial % 7) - 3};
        for (SteadyKind side : {SteadyKind::BadCurvature, SteadyKind::GoodCurvature}) {
            const Matrix2 b = mode_matrix(k, p, side);
            const Complex tr = b[0][0] + b[1][1];
            const Complex det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
            const double disc_b = (tr * tr - 4.0 * det).real();
            const double box = p.box();
            const double closed = discriminant(k, p, side);
            CHECK(closed == doctest::Approx(-box * box * disc_b).epsilon(1e-10).scale(1e-12));
        }
    }

    for (double g : {0.001, 0.05, 0.2, 3.0}) {
        const Params p = Params::from_gradient(0.1, 1.0, g);
        for (int k1 = 1; k1 <= 4; ++k1)
            for (int k2 : {-3, -1, 1, 2}) {
                const double dg = discriminant({k1, k2}, p, SteadyKind::GoodCurvature);
                CHECK(dg < 0.0);
                CHECK(dg <= -4 * kPi * kPi * k2 * k2 * g * g);
            }
    }
}

TEST_CASE("growth rate examples") {
    const double rate = growth_rate({1, 1}, kAcceptance, SteadyKind::BadCurvature);
    CHECK(std::abs(rate - 2.0 / (5 * kPi)) <= 1e-12);
    CHECK(rate == doctest::Approx(0.1273240).epsilon(1e-7));

    const auto dense = dense_eigenvalues(mode_matrix({1, 1}, kAcceptance, SteadyKind::BadCurvature));
    CHECK(std::abs(dense[0].real() - 2.0 / (5 * kPi)) <= 1e-12);

    const Params at = Params(0.01 + 4.0 / (5 * kPi * kPi), 0.01, 1.0);
    CHECK(growth_rate({1, 1}, at, SteadyKind::BadCurvature) == 0.0);

    for (double g : {0.001, 0.0405, 0.2})
        for (int k1 = 1; k1 <= 3; ++k1)
            for (int k2 : {-2, -1, 1, 3})
                CHECK(growth_rate({k1, k2}, Params::from_gradient(0.05, 1.0, g), SteadyKind::GoodCurvature) == 0.0);
}

TEST_CASE("rate equals sqrt(Delta) / (2L) on any box") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double box = 0.3 + 3 * u(rng);
        const ModeIndex k{1 + static_cast<int>(4 * u(rng)), static_cast<int>(1 + 3 * u(rng)) * (u(rng) < 0.5 ? -1 : 1)};
        const double g = 1.2 * mode_threshold(k) * u(rng) + 1e-4;
        const Params p = Params::from_gradient(0.02 + u(rng), box, g);
        const double delta = discriminant(k, p, SteadyKind::BadCurvature);
        const double expected = delta > 0 ? std::sqrt(delta) / (2 * box) : 0.0;
        const ModeAnalysis a = analyze_mode(k, p, SteadyKind::BadCurvature);
        CHECK(a.growth_rate == doctest::Approx(expected).epsilon(1e-9).scale(1e-10));
        const auto dense = dense_eigenvalues(a.matrix);
        CHECK(same_spectrum(a.eigenvalues, dense, 1e-9));
        CHECK((a.growth_rate > 0.0) == (p.gradient() < a.threshold));
    }
}

TEST_CASE("equal temperatures leave only the coupling") {
    // T+ = T- is outside Params; B is built directly.
    const double t = 0.3, omega = 2 * kPi, lam = 5 * kPi * kPi, c = omega / lam;
    const Matrix2 b{{{omega * t - c, -c}, {c, omega * t + c}}};
    const Complex i(0, 1);
    const auto ev = eigenvalues(Matrix2{{{i * b[0][0], i * b[0][1]}, {i * b[1][0], i * b[1][1]}}});
    CHECK(ev[0].imag() == doctest::Approx(omega * t).epsilon(1e-14));
    CHECK(ev[1].imag() == doctest::Approx(omega * t).epsilon(1e-14));
    CHECK(std::abs(ev[0].real()) <= 1e-14);
}

TEST_CASE("trace identity and characteristic polynomial regression") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Params p(0.2 + u(rng), 0.01 + 0.19 * u(rng), 1.0);
        const ModeIndex k{1 + trial % 5, 1 + trial % 3};
        const ModeAnalysis a = analyze_mode(k, p, SteadyKind::BadCurvature);
        const double omega = 2 * kPi * k.k2;
        const Complex trace = a.matrix[0][0] + a.matrix[1][1];
        CHECK(std::abs(trace - omega * (p.t_plus() + p.t_minus())) <= 1e-12 * std::abs(trace));
        const Complex sum = a.eigenvalues[0] + a.eigenvalues[1];
        CHECK(std::abs(sum - Complex(0, 1) * trace) <= 1e-12 * std::abs(trace));

        // Displayed polynomial at L = 1, whose roots are the eigenvalues of -iB.
        const double kk = k.k1 * k.k1 + 4.0 * k.k2 * k.k2;
        const double dt = p.t_plus() - p.t_minus();
        for (const Complex& lam : a.eigenvalues) {
            const Complex x = -lam;
            const Complex residual = x * x + Complex(0, 2 * kPi * k.k2) * (p.t_plus() + p.t_minus()) * x -
                                     4 * kPi * kPi * k.k2 * k.k2 * p.t_plus() * p.t_minus() -
                                     4.0 * k.k2 * k.k2 * dt / kk;
            CHECK(std::abs(residual) <= 1e-10 * (1 + std::norm(x)));
        }
    }
}

TEST_CASE("good side spectrum is imaginary") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Params p = Params::from_gradient(0.01 + u(rng), 0.5 + u(rng), 0.3 * u(rng) + 1e-3);
        const ModeIndex k{1 + trial % 6, (trial % 2 ? 1 : -1) * (1 + trial % 4)};
        const ModeAnalysis a = analyze_mode(k, p, SteadyKind::GoodCurvature);
        CHECK(std::abs(a.eigenvalues[0].real()) < 1e-12);
        CHECK(std::abs(a.eigenvalues[1].real()) < 1e-12);
    }
}

TEST_CASE("scaling the matrix scales real parts and keeps the discriminant sign") {
    const Matrix2 b = mode_matrix({1, 1}, kAcceptance, SteadyKind::BadCurvature);
    for (double s : {0.25, 3.0, 40.0}) {
        Matrix2 scaled = b;
        for (auto& row : scaled)
            for (auto& v : row) v *= s;
        const auto e0 = dense_eigenvalues(b);
        const auto e1 = dense_eigenvalues(scaled);
        CHECK(e1[0].real() == doctest::Approx(s * e0[0].real()).epsilon(1e-10));
        const Complex tr = scaled[0][0] + scaled[1][1];
        const Complex det = scaled[0][0] * scaled[1][1] - scaled[0][1] * scaled[1][0];
        CHECK((tr * tr - 4.0 * det).real() < 0.0);
    }
}

TEST_CASE("eigenvalue branch is continuous through a double root") {
    const double t0 = 0.01;
    const double crit = 4.0 / (5 * kPi * kPi);
    double previous = growth_rate({1, 1}, Params(t0 + crit - 1e-3, t0, 1.0), SteadyKind::BadCurvature);
    for (int i = 1; i <= 40; ++i) {
        const double g = crit - 1e-3 + i * 5e-5;
        const double r = growth_rate({1, 1}, Params(t0 + g, t0, 1.0), SteadyKind::BadCurvature);
        CHECK(r <= previous + 1e-15);
        previous = r;
        if (g > crit + 1e-12) CHECK(r == 0.0);
    }
    const auto ev = eigenvalues(Matrix2{{{Complex(0, 1), 0.0}, {0.0, Complex(0, 1)}}});
    CHECK(ev[0] == Complex(0, 1));
    CHECK(ev[1] == Complex(0, 1));
}

TEST_CASE("dominant mode search") {
    const auto best = dominant_mode(kAcceptance, SteadyKind::BadCurvature, 8);
    REQUIRE(best.has_value());
    CHECK(best->mode == ModeIndex{1, 1});
    CHECK(std::abs(best->growth_rate - 2.0 / (5 * kPi)) <= 1e-12);

    const auto g04 = dominant_mode(Params::from_gradient(0.01, 1.0, 0.04), SteadyKind::BadCurvature, 4);
    REQUIRE(g04.has_value());
    CHECK(g04->mode == ModeIndex{1, 1});

    CHECK_FALSE(dominant_mode(kAcceptance, SteadyKind::GoodCurvature, 8).has_value());
    CHECK_FALSE(dominant_mode(Params::from_gradient(0.01, 1.0, 4.0 / (5 * kPi * kPi)), SteadyKind::BadCurvature, 8)
                    .has_value());
    CHECK_FALSE(dominant_mode(Params::from_gradient(0.01, 1.0, 0.09), SteadyKind::BadCurvature, 8).has_value());
    CHECK_THROWS_AS(dominant_mode(kAcceptance, SteadyKind::BadCurvature, 0), ParameterError);

    const auto scan = scan_modes(kAcceptance, SteadyKind::BadCurvature, 3);
    CHECK(scan.size() == 18);
    CHECK(scan.front().mode == ModeIndex{1, -3});
}

TEST_CASE("threshold map over random gradients") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 0.15);
    for (int trial = 0; trial < 500; ++trial) {
        const double g = u(rng) + 1e-6;
        const Params p = Params::from_gradient(0.01, 1.0, g);
        const bool unstable = dominant_mode(p, SteadyKind::BadCurvature, 6).has_value();
        CHECK(unstable == (g < 4.0 / (5 * kPi * kPi)));
        CHECK_FALSE(dominant_mode(p, SteadyKind::GoodCurvature, 6).has_value());
    }
}

TEST_CASE("eigenmode fields: normalisation, zero mean and linear growth") {
    const Grid g = make_grid(33, 32, 1.0);
    const ModeAnalysis a = analyze_mode({1, 1}, kAcceptance, SteadyKind::BadCurvature);

    const PlasmaState zero = eigenmode_fields(a, 0.0, g);
    CHECK(l2_norm(zero.rho_plus) == 0.0);

    const PlasmaState s = eigenmode_fields(a, 1e-6, g);
    const double norm = std::sqrt(inner(s.rho_plus, s.rho_plus) + inner(s.rho_minus, s.rho_minus));
    CHECK(std::abs(norm - 1e-6) <= 1e-10 * 1e-6);
    CHECK(std::abs(integrate(s.rho_plus + s.rho_minus)) <= 1e-18);

    CHECK_THROWS_AS(eigenmode_fields(analyze_mode({1, 1}, kAcceptance, SteadyKind::GoodCurvature), 1e-6, g),
                    ParameterError);

    // Linear evolution through the 2x2 matrix exponential.
    const Eigen::Matrix2cd gen = Complex(0, 1) * to_eigen(a.matrix);
    const Eigen::Vector2cd h0(a.eigenvector[0], a.eigenvector[1]);
    for (double t : {1.0, 3.0}) {
        const Eigen::Vector2cd ht = (gen * t).exp() * h0;
        CHECK(ht.norm() == doctest::Approx(std::exp(a.growth_rate * t)).epsilon(1e-8));
    }
    const Eigen::Vector2cd residual = gen * h0 - a.eigenvalues[0] * h0;
    CHECK(residual.norm() <= 1e-12);
}

TEST_CASE("eigenvectors across many modes") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const ModeIndex k{1 + trial % 3, trial % 2 ? 1 : -1};
        const Params p = Params::from_gradient(0.05 * u(rng) + 1e-3, 1.0 + u(rng), 0.9 * mode_threshold(k) * u(rng) + 1e-4);
        for (SteadyKind side : {SteadyKind::BadCurvature, SteadyKind::GoodCurvature}) {
            const ModeAnalysis a = analyze_mode(k, p, side);
            const Eigen::Matrix2cd gen = Complex(0, 1) * to_eigen(a.matrix);
            const Eigen::Vector2cd v(a.eigenvector[0], a.eigenvector[1]);
            CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK((gen * v - a.eigenvalues[0] * v).norm() <= 1e-10 * std::max(1.0, gen.norm()));
        }
    }
}
