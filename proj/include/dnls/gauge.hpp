#ifndef DNLS_GAUGE_HPP
#define DNLS_GAUGE_HPP

#include <array>

#include "dnls/grid.hpp"
#include "dnls/littlewood_paley.hpp"

namespace dnls {

struct GaugeParams {
    double lambda = 1.0; // nonzero coupling
    double k = 5.0;      // nonlinearity power, >= 5 (>= 4 in relaxed mode)
    DyadicIndex n = DyadicIndex::band(3);

    void validate(bool relaxed = false) const;
};

struct GaugeTermOptions {
    // Variants of the third nonlinear term's integrand, w = P_<<N u:
    //   conjugate_pair:    |w|^{k-2} [ conj(w) P_<<N(|u|^k u_x) + w P_<<N(|u|^k conj(u)_x) ]
    //   projected_product: |w|^{k-2} P_<<N( |u|^k (u_x + conj(u)_x) )
    //   split_product:     |w|^{k-2} (P_<<N |u|^k) (u_x + conj(u)_x)
    // Only conjugate_pair closes the transformed equation exactly.
    enum class I3Variant { conjugate_pair, projected_product, split_product };
    I3Variant i3_variant = I3Variant::conjugate_pair;
    double edge_tol = 1e-8;
};

// The five nonlinear forcings of the gauged equation.
struct GaugeTermSet {
    std::array<SpacetimeField, 5> terms;

    const SpacetimeField& term(int j) const { return terms[static_cast<std::size_t>(j - 1)]; }
    SpacetimeField sum(std::initializer_list<int> which = {1, 2, 3, 4, 5}) const;
};

// exp(-(i lambda / 2) * primitive(|P_<<N u|^k)) on one slice; unimodular.
Field gauge_phase(const Field& u_slice, const GaugeParams& params, const WindowFamily& w,
                  double edge_tol = 1e-8);

// v_N = phase * P_N u, slice by slice.
SpacetimeField gauge_transform(const SpacetimeField& u, const GaugeParams& params,
                               const WindowFamily& w, double edge_tol = 1e-8);

GaugeTermSet gauge_terms(const SpacetimeField& u, const GaugeParams& params,
                         const WindowFamily& w, GaugeTermOptions opts = {});

// || (i d_t - d_x^2) v_N - sum_j I_{N,j} ||_{L^2_{x,t}} / || v_N ||_{L^2_{x,t}}
// with d_t by 4th-order centered differences on the stored levels (interior
// levels only) and d_x^2 spectral. Needs >= 5 stored levels.
double gauge_residual(const SpacetimeField& u, const GaugeParams& params, const WindowFamily& w,
                      GaugeTermOptions opts = {});

// || v_N(t) - S(t) v_N(0) + i * int_0^t S(t-tau) sum_j I_{N,j}(tau) dtau ||_{L^2}
// normalized by || v_N(t) ||_{L^2}; trapezoid over stored levels up to t.
double duhamel_mismatch(const SpacetimeField& u, const GaugeParams& params, double t,
                        const WindowFamily& w, GaugeTermOptions opts = {});

// Duhamel integral D(t_l) = int_0^{t_l} S(t_l - tau) f(tau) dtau over the
// stored levels of a forcing (trapezoid; exact-propagator kernel).
SpacetimeField duhamel_integral(const SpacetimeField& forcing);

// Fraction of a term's spectral mass outside |xi| <= 8N (the gauge factor
// spreads the band-N localization; this is the declared budget check).
double fourier_mass_outside(const SpacetimeField& term, double cutoff_xi);

} // namespace dnls

#endif
