#ifndef DNLS_SPECTRAL_HPP
#define DNLS_SPECTRAL_HPP

#include <functional>

#include "dnls/grid.hpp"

namespace dnls {

// Discrete Fourier analysis/synthesis pair in the continuum normalization:
//   analyze:    coeff_m = dx * sum_i u(x_i) exp(-i xi_m x_i)
//   synthesize: u(x_i)  = (1/L) * sum_m coeff_m exp(i xi_m x_i)
// Plancherel holds exactly: dx*sum|u|^2 == (1/L)*sum|coeff|^2.
Spectrum analyze(const Field& f);
Field synthesize(const Spectrum& s);

// Apply a frequency multiplier. The Nyquist mode m = -nx/2 has no positive
// partner on the grid and is zeroed here so every operator built this way
// stays conjugation-symmetric.
Field apply_multiplier(const Field& f, const std::function<cplx(double)>& symbol);
void apply_multiplier_inplace(Spectrum& s, const std::function<cplx(double)>& symbol);

enum class DerivativeKind { homogeneous, inhomogeneous };

// D_x^s (multiplier |xi|^s) or <D_x>^s (multiplier (1+xi^2)^(s/2)).
// Homogeneous with s < 0 requires a mean-free input and s >= -1.
Field fractional_derivative(const Field& f, double s, DerivativeKind kind);

// Free Schroedinger propagator S(t): multiplier exp(i t xi^2).
Field propagate(const Field& f, double t);

// F(x) = integral of f from -L/2 to x, anchored so F(-L/2) = 0. Spectral
// antiderivative of the mean-free part plus an explicit linear mean term.
// Demands |f| <= edge_tol at the left grid edge (the real-line surrogate
// is only honest when the integrand has died out at the seam).
Field primitive(const Field& f, double edge_tol = 1e-8);

// |f(x)|^k pointwise, real values in complex storage. 0^0 := 1 when k = 0.
Field pointwise_power_modulus(const Field& f, double k);

// Plain spatial derivative (multiplier i*xi).
Field derivative(const Field& f);

// Zero every mode with |m| > dealias_fraction * nx/2.
void dealias_inplace(Spectrum& s);

// Quadrature norms on the spatial grid. p = inf is the grid maximum.
double l2_norm(const Field& f);
double lp_norm(const Field& f, double p);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

} // namespace dnls

#endif
