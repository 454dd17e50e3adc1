#include "dnls/norms.hpp"

#include <algorithm>
#include <cmath>

namespace dnls {

namespace {

void check(const SpacetimeField& u) {
    if (u.steps() < 1) throw TooFewTimeLevels("mixed norm needs at least one stored level");
}

// Trapezoid weights over the stored levels; a single level degenerates to
// weight T (so static fields behave like constants in time).
double time_weight(const SpacetimeField& u, int l) {
    if (u.steps() == 1) return std::max(u.level_spacing, 0.0);
    return (l == 0 || l == u.steps() - 1) ? 0.5 * u.level_spacing : u.level_spacing;
}

} // namespace

double mixed_norm(const SpacetimeField& u, const MixedNormSpec& spec) {
    check(u);
    const int nl = u.steps();
    const int nx = u.grid.nx;
    const double p = spec.p_space;
    const double q = spec.q_time;
    if ((p < 1.0 && p != kInfinity) || (q < 1.0 && q != kInfinity))
        throw std::invalid_argument("mixed_norm: exponents must be >= 1 or infinity");

    if (spec.order == MixedNormSpec::Order::space_outer) {
        // inner: L_T^q at each x; outer: L_x^p.
        long double outer = 0.0L;
        double outer_max = 0.0;
        for (int i = 0; i < nx; ++i) {
            double inner;
            if (q == kInfinity) {
                double m = 0.0;
                for (int l = 0; l < nl; ++l) m = std::max(m, std::abs(u.slice(l)[i]));
                inner = m;
            } else {
                long double acc = 0.0L;
                for (int l = 0; l < nl; ++l)
                    acc += time_weight(u, l) * std::pow(static_cast<long double>(std::abs(u.slice(l)[i])), q);
                inner = static_cast<double>(std::pow(acc, 1.0L / q));
            }
            if (p == kInfinity)
                outer_max = std::max(outer_max, inner);
            else
                outer += std::pow(static_cast<long double>(inner), p);
        }
        if (p == kInfinity) return outer_max;
        return static_cast<double>(std::pow(outer * u.grid.dx(), 1.0L / p));
    }

    // time outer: inner L_x^p per level, then L_T^q across levels.
    std::vector<double> space(nl);
    for (int l = 0; l < nl; ++l) space[static_cast<std::size_t>(l)] = lp_norm(u.slice(l), p);
    if (q == kInfinity) return *std::max_element(space.begin(), space.end());
    long double acc = 0.0L;
    for (int l = 0; l < nl; ++l)
        acc += time_weight(u, l) * std::pow(static_cast<long double>(space[static_cast<std::size_t>(l)]), q);
    return static_cast<double>(std::pow(acc, 1.0L / q));
}

double sobolev_norm(const Field& f, double s, bool homogeneous) {
    Spectrum spec = analyze(f);
    if (homogeneous && s < 0.0) {
        double scale = 0.0;
        for (const cplx& z : spec.coeff) scale = std::max(scale, std::abs(z));
        if (std::abs(spec[0]) > 1e-12 * std::max(scale, 1e-300))
            throw NegativeHomogeneousOnMeanful("sobolev_norm: Hdot^s with s<0 needs zero mean");
    }
    long double acc = 0.0L;
    for (int j = 0; j < spec.grid.nx; ++j) {
        const double xi = spec.grid.xi(j);
        double w;
        if (homogeneous) {
            const double axi = std::abs(xi);
            if (axi == 0.0)
                w = (s == 0.0) ? 1.0 : 0.0;
            else
                w = std::pow(axi, 2.0 * s);
        } else {
            w = std::pow(1.0 + xi * xi, s);
        }
        acc += w * static_cast<long double>(std::norm(spec[j]));
    }
    return std::sqrt(static_cast<double>(acc) / spec.grid.length);
}

namespace {

// Shared four-piece evaluation; `block` maps a slice spectrum (already
// windowed if dyadic) onto the three multiplier variants.
struct Pieces {
    double sup_sobolev = 0.0;
    double smoothing = 0.0;
    double maximal_l2 = 0.0;
    double maximal_l4 = 0.0;
};

Pieces field_pieces(const SpacetimeField& v) {
    Pieces out;
    SpacetimeField dxv, quarter;
    dxv.grid = quarter.grid = v.grid;
    dxv.level_spacing = quarter.level_spacing = v.level_spacing;
    for (int l = 0; l < v.steps(); ++l) {
        out.sup_sobolev = std::max(out.sup_sobolev, sobolev_norm(v.slice(l), 0.5));
        Spectrum s = analyze(v.slice(l));
        Spectrum d = s, q = s;
        for (int j = 0; j < s.grid.nx; ++j) {
            const double xi = s.grid.xi(j);
            d[j] *= cplx{0.0, xi};
            q[j] *= std::pow(1.0 + xi * xi, 0.125);
        }
        d[s.grid.nyquist_index()] = q[s.grid.nyquist_index()] = cplx{0.0, 0.0};
        dxv.levels.push_back(synthesize(d));
        quarter.levels.push_back(synthesize(q));
    }
    out.smoothing = mixed_norm(dxv, MixedNormSpec::lx_lt(kInfinity, 2.0));
    out.maximal_l2 = mixed_norm(v, MixedNormSpec::lx_lt(2.0, kInfinity));
    out.maximal_l4 = mixed_norm(quarter, MixedNormSpec::lx_lt(4.0, kInfinity));
    return out;
}

} // namespace

XtNormBreakdown xt_norm(const SpacetimeField& u, const WindowFamily& w, XtNormOptions opts) {
    check(u);
    XtNormBreakdown out;
    for (int l = 0; l < u.steps(); ++l)
        out.sup_sobolev = std::max(out.sup_sobolev, sobolev_norm(u.slice(l), 0.5));

    long double sm = 0.0L, m2 = 0.0L, m4 = 0.0L;
    for (const DyadicIndex& idx : w.indices()) {
        if (idx.is_low() && !opts.include_low_block) continue;
        if (!idx.is_low() && opts.max_band_exponent >= 0 && idx.j > opts.max_band_exponent)
            continue;
        SpacetimeField block = project(u, idx, w);
        Pieces p = field_pieces(block);
        sm += static_cast<long double>(p.smoothing) * p.smoothing;
        m2 += static_cast<long double>(p.maximal_l2) * p.maximal_l2;
        m4 += static_cast<long double>(p.maximal_l4) * p.maximal_l4;
    }
    out.smoothing = std::sqrt(static_cast<double>(sm));
    out.maximal_l2 = std::sqrt(static_cast<double>(m2));
    out.maximal_l4 = std::sqrt(static_cast<double>(m4));
    out.total = out.sup_sobolev + out.smoothing + out.maximal_l2 + out.maximal_l4;
    return out;
}

YtNormBreakdown yt_norm_breakdown(const SpacetimeField& v) {
    check(v);
    Pieces p = field_pieces(v);
    YtNormBreakdown out;
    out.sup_sobolev = p.sup_sobolev;
    out.smoothing = p.smoothing;
    out.maximal_l2 = p.maximal_l2;
    out.maximal_l4 = p.maximal_l4;
    out.total = p.sup_sobolev + p.smoothing + p.maximal_l2 + p.maximal_l4;
    return out;
}

double yt_norm(const SpacetimeField& v) { return yt_norm_breakdown(v).total; }

} // namespace dnls
