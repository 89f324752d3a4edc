#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace plasma_lab {

// Error categories shared by every module.
struct SizingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Physical parameters of the slab: hot and cold temperatures and box length.
class Params {
public:
    /// Throws ParameterError unless t_plus > t_minus > 0 and box > 0.
    Params(double t_plus, double t_minus, double box);

    double t_plus() const { return t_plus_; }
    double t_minus() const { return t_minus_; }
    double box() const { return box_; }
    /// Temperature gradient (T+ - T-) / L.
    double gradient() const { return (t_plus_ - t_minus_) / box_; }

    /// Parameters with the given cold temperature, box and gradient.
    static Params from_gradient(double t_minus, double box, double gradient);

private:
    double t_plus_;
    double t_minus_;
    double box_;
};

/// Uniform grid on [0,L] x [0,L). Along x1 both walls are stored; along x2
/// the periodic duplicate is dropped.
class Grid {
public:
    Grid() = default;

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double box() const { return box_; }
    double h1() const { return box_ / (n1_ - 1); }
    double h2() const { return box_ / n2_; }
    double x1(int j) const { return j * h1(); }
    double x2(int m) const { return m * h2(); }
    std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
    std::size_t index(int j, int m) const { return static_cast<std::size_t>(j) * n2_ + m; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    friend Grid make_grid(int n1, int n2, double box);
    Grid(int n1, int n2, double box) : n1_(n1), n2_(n2), box_(box) {}

    int n1_ = 0;
    int n2_ = 0;
    double box_ = 0.0;
};

/// Throws SizingError unless n1 >= 5, n2 >= 4, box > 0 and n1-1, n2 are
/// powers of two.
Grid make_grid(int n1, int n2, double box);

/// Real samples on a grid, row-major over (x1 index, x2 index).
class Field {
public:
    Field() = default;
    explicit Field(const Grid& grid, double value = 0.0);
    Field(const Grid& grid, std::vector<double> data);

    /// Samples f(x1, x2) at every node.
    template <typename F>
    static Field sample(const Grid& grid, F&& f) {
        Field out(grid);
        for (int j = 0; j < grid.n1(); ++j)
            for (int m = 0; m < grid.n2(); ++m)
                out(j, m) = f(grid.x1(j), grid.x2(m));
        return out;
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int j, int m) { return data_[grid_.index(j, m)]; }
    double operator()(int j, int m) const { return data_[grid_.index(j, m)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool all_finite() const;
    double min() const;
    double max() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);
    Field& operator+=(double s);

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

private:
    Grid grid_;
    std::vector<double> data_;
};

struct PlasmaState {
    Field rho_plus;
    Field rho_minus;
    double time = 0.0;

    const Grid& grid() const { return rho_plus.grid(); }
};

enum class SteadyKind { GoodCurvature, BadCurvature };

std::string to_string(SteadyKind kind);
/// Accepts "good"/"bad" (case-sensitive); throws ParameterError otherwise.
SteadyKind parse_steady_kind(const std::string& text);

/// Linear hot/cold profiles: bad side puts the hot species at x1 = 0.
PlasmaState steady_state(SteadyKind kind, const Grid& grid);

/// Trapezoid in x1, rectangle in x2.
double integrate(const Field& f);
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);

/// Integral of rho+ + rho- over the box.
double total_mass(const PlasmaState& state);

/// Sum of sin(k1 pi x1/L) (a cos(2 pi k2 x2/L) + b sin(2 pi k2 x2/L)) over
/// 1 <= k1, k2 <= k_max with independent random
/// coefficients per species, scaled so the pair has L2 norm `amplitude`.
/// Every term has zero mean.
PlasmaState smooth_perturbation(const Grid& grid, double amplitude, int k_max, unsigned seed);

/// Pointwise sum of two states; the time of `base` is kept.
PlasmaState superpose(const PlasmaState& base, const PlasmaState& perturbation);

}  // namespace plasma_lab
