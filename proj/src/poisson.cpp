#include "plasma_lab/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace plasma_lab {

namespace {

// The FFTW planner is not re-entrant; execution on new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan p) const {
        if (p) fftw_destroy_plan(p);
    }
};
using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

}  // namespace

// Layout conventions (N = n1 - 1, nq = n2/2 + 1):
//   rows_r2c : r2c along x2 for `howmany` contiguous rows of length n2
//   rows_c2r : its inverse
//   sine     : RODFT00 of length N-1 along x1, applied to interleaved re/im
//              columns of an (N-1) x nq complex block
//   cosine   : REDFT00 of length N+1 along x1 on an (N+1) x nq complex block
struct SpectralPlan::Plans {
    PlanHandle interior_r2c;
    PlanHandle interior_c2r;
    PlanHandle all_r2c;
    PlanHandle all_c2r;
    PlanHandle sine;
    PlanHandle cosine;
};

SpectralPlan::SpectralPlan(const Grid& grid) : grid_(grid) {
    const int n1 = grid.n1();
    const int n2 = grid.n2();
    const int interior = n1 - 2;
    const int nq = n2 / 2 + 1;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;

    std::vector<double> real(static_cast<std::size_t>(n1) * n2);
    std::vector<double> spec(static_cast<std::size_t>(n1) * 2 * nq);
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());

    auto plans = std::make_shared<Plans>();
    std::lock_guard lock(planner_mutex());
    int n[] = {n2};
    plans->interior_r2c.reset(fftw_plan_many_dft_r2c(1, n, interior, real.data(), nullptr, 1, n2, cplx,
                                                     nullptr, 1, nq, flags));
    plans->interior_c2r.reset(fftw_plan_many_dft_c2r(1, n, interior, cplx, nullptr, 1, nq, real.data(),
                                                     nullptr, 1, n2, flags));
    plans->all_r2c.reset(
        fftw_plan_many_dft_r2c(1, n, n1, real.data(), nullptr, 1, n2, cplx, nullptr, 1, nq, flags));
    plans->all_c2r.reset(
        fftw_plan_many_dft_c2r(1, n, n1, cplx, nullptr, 1, nq, real.data(), nullptr, 1, n2, flags));

    int ns[] = {interior};
    fftw_r2r_kind rodft[] = {FFTW_RODFT00};
    plans->sine.reset(fftw_plan_many_r2r(1, ns, 2 * nq, spec.data(), nullptr, 2 * nq, 1, spec.data(),
                                         nullptr, 2 * nq, 1, rodft, flags));
    int nc[] = {n1};
    fftw_r2r_kind redft[] = {FFTW_REDFT00};
    plans->cosine.reset(fftw_plan_many_r2r(1, nc, 2 * nq, spec.data(), nullptr, 2 * nq, 1, spec.data(),
                                           nullptr, 2 * nq, 1, redft, flags));
    if (!plans->interior_r2c || !plans->interior_c2r || !plans->all_r2c || !plans->all_c2r ||
        !plans->sine || !plans->cosine)
        throw ConsistencyError("FFTW planning failed");
    plans_ = std::move(plans);
}

double SpectralPlan::eigenvalue(int k1, int k2) const {
    const double pi = std::numbers::pi;
    const double box = grid_.box();
    return pi * pi * (static_cast<double>(k1) * k1 + 4.0 * static_cast<double>(k2) * k2) / (box * box);
}

SineSpectrum SpectralPlan::forward(const Field& f) const {
    if (!(f.grid() == grid_)) throw SizingError("field grid does not match spectral plan");
    const int n1 = grid_.n1();
    const int n2 = grid_.n2();
    const int interior = n1 - 2;
    const int nq = n2 / 2 + 1;

    SineSpectrum out{interior, nq, std::vector<std::complex<double>>(static_cast<std::size_t>(interior) * nq)};
    std::vector<double> rows(f.values().begin() + n2, f.values().begin() + static_cast<std::ptrdiff_t>(n1 - 1) * n2);
    auto* cplx = reinterpret_cast<fftw_complex*>(out.coeffs.data());
    auto* flat = reinterpret_cast<double*>(out.coeffs.data());
    fftw_execute_dft_r2c(plans_->interior_r2c.get(), rows.data(), cplx);
    fftw_execute_r2r(plans_->sine.get(), flat, flat);

    // RODFT00 yields 2 sum f_j sin(...) = N c_k for N = n1 - 1.
    const double scale = 1.0 / (static_cast<double>(n1 - 1) * n2);
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

Field SpectralPlan::synthesize(const SineSpectrum& s) const {
    const int n2 = grid_.n2();
    const int interior = grid_.n1() - 2;
    SineSpectrum work = s;
    for (auto& c : work.coeffs) c *= 0.5;  // RODFT00 doubles every term
    auto* flat = reinterpret_cast<double*>(work.coeffs.data());
    fftw_execute_r2r(plans_->sine.get(), flat, flat);

    Field out(grid_);
    std::vector<double> rows(static_cast<std::size_t>(interior) * n2);
    fftw_execute_dft_c2r(plans_->interior_c2r.get(), reinterpret_cast<fftw_complex*>(work.coeffs.data()),
                         rows.data());
    std::copy(rows.begin(), rows.end(), out.values().begin() + n2);
    return out;
}

Field SpectralPlan::synthesize_dx1(const SineSpectrum& s) const {
    const int n1 = grid_.n1();
    const int nq = s.modes2;
    const double pi = std::numbers::pi;

    std::vector<std::complex<double>> work(static_cast<std::size_t>(n1) * nq);
    for (int k1 = 1; k1 <= s.modes1; ++k1) {
        const double wave = k1 * pi / grid_.box();
        for (int q = 0; q < nq; ++q) work[static_cast<std::size_t>(k1) * nq + q] = 0.5 * wave * s.at(k1, q);
    }
    auto* flat = reinterpret_cast<double*>(work.data());
    fftw_execute_r2r(plans_->cosine.get(), flat, flat);

    Field out(grid_);
    fftw_execute_dft_c2r(plans_->all_c2r.get(), reinterpret_cast<fftw_complex*>(work.data()),
                         out.values().data());
    return out;
}

Field SpectralPlan::apply_x2_symbol(const Field& f, std::span<const std::complex<double>> symbol) const {
    if (!(f.grid() == grid_)) throw SizingError("field grid does not match spectral plan");
    const int n1 = grid_.n1();
    const int n2 = grid_.n2();
    const int nq = n2 / 2 + 1;
    if (symbol.size() != static_cast<std::size_t>(nq)) throw SizingError("x2 symbol has the wrong length");

    std::vector<double> in(f.values().begin(), f.values().end());
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n1) * nq);
    fftw_execute_dft_r2c(plans_->all_r2c.get(), in.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    const double scale = 1.0 / n2;
    for (int j = 0; j < n1; ++j)
        for (int q = 0; q < nq; ++q) spec[static_cast<std::size_t>(j) * nq + q] *= symbol[q] * scale;
    Field out(grid_);
    fftw_execute_dft_c2r(plans_->all_c2r.get(), reinterpret_cast<fftw_complex*>(spec.data()),
                         out.values().data());
    return out;
}

Field SpectralPlan::dx2(const Field& f) const {
    const int n2 = grid_.n2();
    const double pi = std::numbers::pi;
    std::vector<std::complex<double>> symbol(n2 / 2 + 1);
    for (int q = 0; q < n2 / 2; ++q) symbol[q] = {0.0, 2.0 * pi * q / grid_.box()};
    return apply_x2_symbol(f, symbol);
}

Field SpectralPlan::solve_potential(const Field& charge) const {
    SineSpectrum s = forward(charge);
    for (int k1 = 1; k1 <= s.modes1; ++k1)
        for (int q = 0; q < s.modes2; ++q) s.at(k1, q) /= eigenvalue(k1, q);
    return synthesize(s);
}

ElectricField SpectralPlan::electric_field(const Field& potential) const {
    Field e1 = synthesize_dx1(forward(potential));
    e1 *= -1.0;
    Field e2 = dx2(potential);
    e2 *= -1.0;
    // Dirichlet rows: V is identically zero there, so its x2-derivative is too.
    for (int m = 0; m < grid_.n2(); ++m) {
        e2(0, m) = 0.0;
        e2(grid_.n1() - 1, m) = 0.0;
    }
    return {std::move(e1), std::move(e2)};
}

Field SpectralPlan::divergence(const VectorField& v) const {
    return synthesize_dx1(forward(v.a1)) + dx2(v.a2);
}

Field solve_potential(const Field& charge) { return SpectralPlan(charge.grid()).solve_potential(charge); }

ElectricField electric_field(const Field& potential) {
    return SpectralPlan(potential.grid()).electric_field(potential);
}

VectorField perp(const ElectricField& e) { return {e.e2, -1.0 * e.e1}; }

double field_energy(const ElectricField& e) { return inner(e.e1, e.e1) + inner(e.e2, e.e2); }

Field net_charge(const PlasmaState& state) {
    Field charge = state.rho_plus + state.rho_minus;
    charge += -1.0;
    return charge;
}

}  // namespace plasma_lab
