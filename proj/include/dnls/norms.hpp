#ifndef DNLS_NORMS_HPP
#define DNLS_NORMS_HPP

#include "dnls/grid.hpp"
#include "dnls/littlewood_paley.hpp"

namespace dnls {

// Mixed space-time Lebesgue norm L_T^q L_x^p (time outer) or L_x^p L_T^q
// (space outer). Quadrature: trapezoid in time, Riemann sum in space,
// infinity realized as the grid/sample maximum.
struct MixedNormSpec {
    double p_space = 2.0;
    double q_time = 2.0;
    enum class Order { time_outer, space_outer } order = Order::space_outer;

    static MixedNormSpec lt_lx(double q, double p) {
        return MixedNormSpec{p, q, Order::time_outer};
    }
    static MixedNormSpec lx_lt(double p, double q) {
        return MixedNormSpec{p, q, Order::space_outer};
    }
};

double mixed_norm(const SpacetimeField& u, const MixedNormSpec& spec);

// H^s (inhomogeneous) or Hdot^s (homogeneous) by weighted Plancherel sum.
double sobolev_norm(const Field& f, double s, bool homogeneous = false);

// The four summands of the X_T norm; total is their sum.
struct XtNormBreakdown {
    double sup_sobolev = 0.0; // L_T^inf H^{1/2}
    double smoothing = 0.0;   // l2_N || d_x P_N u ||_{L_x^inf L_T^2}
    double maximal_l2 = 0.0;  // l2_N || P_N u ||_{L_x^2 L_T^inf}
    double maximal_l4 = 0.0;  // l2_N || <D>^{1/4} P_N u ||_{L_x^4 L_T^inf}
    double total = 0.0;
};

struct XtNormOptions {
    bool include_low_block = true; // whether the dyadic sums count P_0
    int max_band_exponent = -1;    // cap the dyadic ladder (-1: all usable)
};

XtNormBreakdown xt_norm(const SpacetimeField& u, const WindowFamily& w, XtNormOptions opts = {});

// Y_T norm: same four pieces evaluated on the field itself (no dyadic sums).
struct YtNormBreakdown {
    double sup_sobolev = 0.0;
    double smoothing = 0.0;
    double maximal_l2 = 0.0;
    double maximal_l4 = 0.0;
    double total = 0.0;
};

YtNormBreakdown yt_norm_breakdown(const SpacetimeField& v);
double yt_norm(const SpacetimeField& v);

} // namespace dnls

#endif
