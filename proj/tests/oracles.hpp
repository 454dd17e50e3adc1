#ifndef DNLS_TESTS_ORACLES_HPP
#define DNLS_TESTS_ORACLES_HPP

// Independent oracles for the test suite. Everything here is deliberately
// naive (nested loops, trapezoid sums, closed forms) and never calls the
// spectral paths it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "dnls/grid.hpp"

namespace oracle {

using dnls::cplx;
using dnls::Field;
using dnls::GridSpec;
using dnls::SpacetimeField;

// Cumulative trapezoid antiderivative anchored at the left edge.
inline std::vector<cplx> cumulative_trapezoid(const Field& f) {
    std::vector<cplx> out(static_cast<std::size_t>(f.grid.nx), cplx{0.0, 0.0});
    const double h = f.grid.dx();
    for (int i = 1; i < f.grid.nx; ++i)
        out[static_cast<std::size_t>(i)] =
            out[static_cast<std::size_t>(i - 1)] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

// Trapezoid quadrature of a scalar function on [a, b].
inline double quadrature(const std::function<double(double)>& fn, double a, double b, int n) {
    double acc = 0.5 * (fn(a) + fn(b));
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) acc += fn(a + i * h);
    return acc * h;
}

// Richardson: observed order from successive differences.
inline double observed_order(double coarse_diff, double fine_diff) {
    return std::log2(coarse_diff / fine_diff);
}

// Random Nyquist-free band-limited field with |m| <= max_mode.
inline Field random_field(const GridSpec& grid, int max_mode, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    Field f(grid);
    for (int m = -max_mode; m <= max_mode; ++m) {
        const double amp = unit();
        const double phase = 2.0 * M_PI * unit();
        const double xi = 2.0 * M_PI * m / grid.length;
        for (int i = 0; i < grid.nx; ++i)
            f[i] += std::polar(amp, phase + xi * grid.x(i));
    }
    return f;
}

// Brute-force Y_T pieces with explicit loops (same quadrature definitions
// as the library: trapezoid in time, Riemann in space, max for infinity).
struct YtPieces {
    double linf_l2 = 0.0;   // here: L_x^inf L_T^2 of a provided field
    double l2_linf = 0.0;   // L_x^2 L_T^inf
    double l4_linf = 0.0;   // L_x^4 L_T^inf
};

inline YtPieces brute_mixed(const SpacetimeField& v) {
    YtPieces out;
    const int nl = v.steps();
    const int nx = v.grid.nx;
    const double h = v.level_spacing;
    double worst = 0.0;
    long double l2acc = 0.0L, l4acc = 0.0L;
    for (int i = 0; i < nx; ++i) {
        long double t2 = 0.0L;
        double tmax = 0.0;
        for (int l = 0; l < nl; ++l) {
            const double a = std::abs(v.slice(l)[i]);
            const double wgt = (l == 0 || l == nl - 1) ? 0.5 : 1.0;
            t2 += wgt * h * a * a;
            tmax = std::max(tmax, a);
        }
        worst = std::max(worst, static_cast<double>(std::sqrt(t2)));
        l2acc += tmax * tmax;
        l4acc += std::pow(static_cast<long double>(tmax), 4.0L);
    }
    out.linf_l2 = worst;
    out.l2_linf = std::sqrt(static_cast<double>(l2acc * v.grid.dx()));
    out.l4_linf = static_cast<double>(std::pow(l4acc * v.grid.dx(), 0.25L));
    return out;
}

} // namespace oracle

#endif
