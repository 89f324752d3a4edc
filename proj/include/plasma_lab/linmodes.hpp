#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "plasma_lab/core.hpp"

namespace plasma_lab {

/// Wave numbers of g_k(x) = sin(k1 pi x1 / L) exp(2 pi i k2 x2 / L).
struct ModeIndex {
    int k1 = 1;
    int k2 = 1;

    void validate() const;
    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

using Complex = std::complex<double>;
using Matrix2 = std::array<std::array<Complex, 2>, 2>;

/// Linearised dynamics of one Fourier mode, dh/dt = i B h with h = (h+, h-).
struct ModeAnalysis {
    ModeIndex mode;
    SteadyKind side = SteadyKind::BadCurvature;
    Matrix2 matrix{};
    /// Eigenvalues of the generator i B; the first has the largest real part.
    std::array<Complex, 2> eigenvalues{};
    /// Unit eigenvector of i B for eigenvalues[0].
    std::array<Complex, 2> eigenvector{};
    double discriminant = 0.0;
    double growth_rate = 0.0;
    double threshold = 0.0;
};

/// B for the given side. With w = 2 pi k2 / L, lam = pi^2 (k1^2 + 4 k2^2) / L^2
/// and c = w / (L lam): bad side [[w T+ - c, -c], [c, w T- + c]]; the good
/// side flips every c.
Matrix2 mode_matrix(ModeIndex mode, const Params& params, SteadyKind side);

/// -4 pi^2 k2^2 dT (dT -+ 4L / (pi^2 (k1^2 + 4 k2^2))), minus sign on the bad
/// side. Equals -L^2 times the discriminant of B.
double discriminant(ModeIndex mode, const Params& params, SteadyKind side);

/// Largest real part of the eigenvalues of i B, floored at zero.
double growth_rate(ModeIndex mode, const Params& params, SteadyKind side);

/// Critical gradient 4 / (pi^2 (k1^2 + 4 k2^2)): the bad-side mode grows iff
/// (T+ - T-)/L lies strictly below it.
double mode_threshold(ModeIndex mode);

/// Eigenvalues of a general complex 2x2 matrix, the first with the larger
/// real part. The square-root branch is continuous through a zero
/// discriminant.
std::array<Complex, 2> eigenvalues(const Matrix2& a);

ModeAnalysis analyze_mode(ModeIndex mode, const Params& params, SteadyKind side);

/// Every mode with 1 <= k1 <= k_max and 1 <= |k2| <= k_max, ordered by k1
/// then k2.
std::vector<ModeAnalysis> scan_modes(const Params& params, SteadyKind side, int k_max);

/// The fastest-growing mode in the scan window. Ties go to the smallest
/// k1^2 + 4 k2^2, then to positive k2. Empty when nothing grows.
std::optional<ModeAnalysis> dominant_mode(const Params& params, SteadyKind side, int k_max);

/// Real part of (h+, h-) g_k on the grid for the growing eigenvector, scaled
/// to L2 norm `amplitude`. Throws ParameterError for a non-growing mode.
PlasmaState eigenmode_fields(const ModeAnalysis& analysis, double amplitude, const Grid& grid);

}  // namespace plasma_lab
