#ifndef DNLS_GRID_HPP
#define DNLS_GRID_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "dnls/errors.hpp"

namespace dnls {

using cplx = std::complex<double>;

// Periodic space-time discretization. Space covers [-L/2, L/2) with nx
// uniform points; frequencies are xi_m = 2*pi*m/L, m in [-nx/2, nx/2).
struct GridSpec {
    int nx = 0;
    double length = 0.0;
    double dt = 0.0;
    double horizon = 0.0;
    double dealias_fraction = 2.0 / 3.0;

    double dx() const { return length / nx; }
    double x(int i) const { return -0.5 * length + i * dx(); }

    // FFT storage order: index j holds mode m = j for j < nx/2, else j - nx.
    int mode(int j) const { return j < nx / 2 ? j : j - nx; }
    double xi(int j) const { return 2.0 * M_PI * mode(j) / length; }
    double xi_max() const { return M_PI * nx / length; }
    int nyquist_index() const { return nx / 2; }

    std::int64_t steps() const { return std::llround(horizon / dt); }

    bool operator==(const GridSpec&) const = default;
};

// Validating constructor; throws ConfigInvalid on bad parameters.
GridSpec make_grid(int nx, double length, double dt, double horizon,
                   double dealias_fraction = 2.0 / 3.0);

// One refinement step: double nx, halve dt. Used by convergence ladders.
GridSpec refine_space_time(const GridSpec& g);
GridSpec refine_space(const GridSpec& g);
GridSpec refine_time(const GridSpec& g);

// Complex samples u(x_i) at a single time.
struct Field {
    GridSpec grid;
    std::vector<cplx> values;

    Field() = default;
    Field(const GridSpec& g, cplx fill = cplx{0.0, 0.0})
        : grid(g), values(static_cast<std::size_t>(g.nx), fill) {}
    Field(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {}

    int size() const { return static_cast<int>(values.size()); }
    cplx& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    const cplx& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    bool finite() const;
};

// Fourier coefficients in FFT storage order. coeff[j] approximates the
// continuum transform integral of u against exp(-i xi_j x) over the domain.
struct Spectrum {
    GridSpec grid;
    std::vector<cplx> coeff;

    Spectrum() = default;
    Spectrum(const GridSpec& g, cplx fill = cplx{0.0, 0.0})
        : grid(g), coeff(static_cast<std::size_t>(g.nx), fill) {}

    int size() const { return static_cast<int>(coeff.size()); }
    cplx& operator[](int j) { return coeff[static_cast<std::size_t>(j)]; }
    const cplx& operator[](int j) const { return coeff[static_cast<std::size_t>(j)]; }
};

// Complex samples over the stored (t, x) lattice. Levels are uniformly
// spaced by level_spacing; level 0 is t = 0, the last level is t = horizon
// of the producing run (or whatever window the producer chose).
struct SpacetimeField {
    GridSpec grid;
    double level_spacing = 0.0;
    std::vector<Field> levels;

    int steps() const { return static_cast<int>(levels.size()); }
    double time(int l) const { return l * level_spacing; }
    double duration() const { return levels.empty() ? 0.0 : (steps() - 1) * level_spacing; }

    const Field& slice(int l) const { return levels[static_cast<std::size_t>(l)]; }
    Field& slice(int l) { return levels[static_cast<std::size_t>(l)]; }
};

// Keep levels with t <= t_max (plus the level at t_max itself when aligned).
SpacetimeField restrict_horizon(const SpacetimeField& u, double t_max);

} // namespace dnls

#endif
