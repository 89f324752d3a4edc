#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "plasma_lab/core.hpp"

namespace plasma_lab {

struct ElectricField {
    Field e1;  // -dV/dx1
    Field e2;  // -dV/dx2
};

struct VectorField {
    Field a1;
    Field a2;
};

/// Coefficients c(k1, q) of f = sum c sin(k1 pi x1/L) exp(2 pi i q x2/L) for
/// k1 = 1..n1-2 and the non-negative half q = 0..n2/2 of the x2 spectrum.
struct SineSpectrum {
    int modes1 = 0;
    int modes2 = 0;
    std::vector<std::complex<double>> coeffs;

    std::complex<double>& at(int k1, int q) { return coeffs[static_cast<std::size_t>(k1 - 1) * modes2 + q]; }
    std::complex<double> at(int k1, int q) const { return coeffs[static_cast<std::size_t>(k1 - 1) * modes2 + q]; }
};

/// Transforms for the Laplacian with V = 0 on x1 in {0, L} and periodicity in
/// x2: a sine series along x1 (interior rows only) and a real DFT along x2.
/// Immutable after construction; copies share the underlying FFTW plans and
/// may be used from several threads at once.
class SpectralPlan {
public:
    explicit SpectralPlan(const Grid& grid);

    const Grid& grid() const { return grid_; }

    /// pi^2 (k1^2 + 4 k2^2) / L^2, the eigenvalue of -Laplacian on g_k.
    double eigenvalue(int k1, int k2) const;

    /// Solves -Laplacian V = charge. Wall rows of the charge are ignored.
    Field solve_potential(const Field& charge) const;
    /// E = -grad V with the x1 derivative taken on the cosine series.
    ElectricField electric_field(const Field& potential) const;
    /// Spectral d(a1)/dx1 + d(a2)/dx2; a1 must vanish on both walls.
    Field divergence(const VectorField& v) const;

    SineSpectrum forward(const Field& f) const;
    Field synthesize(const SineSpectrum& s) const;
    /// x1-derivative of the sine series, evaluated on every row including walls.
    Field synthesize_dx1(const SineSpectrum& s) const;
    /// Row-wise Fourier derivative along x2; the Nyquist mode is dropped.
    Field dx2(const Field& f) const;
    /// Row-wise multiplication of the x2 spectrum by symbol[q], q = 0..n2/2.
    Field apply_x2_symbol(const Field& f, std::span<const std::complex<double>> symbol) const;

private:
    struct Plans;
    Grid grid_;
    std::shared_ptr<const Plans> plans_;
};

/// Convenience wrappers that build a plan for the field's grid.
Field solve_potential(const Field& charge);
ElectricField electric_field(const Field& potential);

/// Rotation A -> (A2, -A1).
VectorField perp(const ElectricField& e);
/// Integral of E1^2 + E2^2 over the box.
double field_energy(const ElectricField& e);

/// rho+ + rho- - 1.
Field net_charge(const PlasmaState& state);

}  // namespace plasma_lab
