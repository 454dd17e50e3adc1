#include "dnls/gauge.hpp"

#include <cmath>
#include <string>

namespace dnls {

namespace {

constexpr double kZeroGuard = 1e-14; // |w| below this counts as a zero of w

// |w|^p with the convention 0^p = 0 for p > 0 (and 1 for p = 0), evaluated
// only where |w| > guard so negative p never sees a zero.
double guarded_pow(double a, double p) {
    if (a <= kZeroGuard) return p == 0.0 ? 1.0 : 0.0;
    return std::exp(p * std::log(a));
}

Field real_primitive(const Field& f, double edge_tol) {
    Field out = primitive(f, edge_tol);
    for (cplx& z : out.values) z = cplx{z.real(), 0.0};
    return out;
}

} // namespace

void GaugeParams::validate(bool relaxed) const {
    if (lambda == 0.0) throw ConfigInvalid("gauge: lambda must be nonzero");
    const double kmin = relaxed ? 4.0 : 5.0;
    if (k < kmin)
        throw ConfigInvalid("gauge: k must be >= " + std::to_string(kmin));
    if (n.is_low()) throw ConfigInvalid("gauge: N must be a dyadic band, not the low block");
}

SpacetimeField GaugeTermSet::sum(std::initializer_list<int> which) const {
    if (which.size() == 0) throw std::invalid_argument("GaugeTermSet::sum: empty selection");
    const SpacetimeField& first = term(*which.begin());
    SpacetimeField out;
    out.grid = first.grid;
    out.level_spacing = first.level_spacing;
    out.levels.assign(first.levels.begin(), first.levels.end());
    bool skip = true;
    for (int j : which) {
        if (skip) { skip = false; continue; }
        const SpacetimeField& t = term(j);
        for (int l = 0; l < out.steps(); ++l)
            for (int i = 0; i < out.grid.nx; ++i) out.slice(l)[i] += t.slice(l)[i];
    }
    return out;
}

Field gauge_phase(const Field& u_slice, const GaugeParams& params, const WindowFamily& w,
                  double edge_tol) {
    const double n = params.n.value();
    Field low = project_region(u_slice, DyadicRelation::much_less, n, w);
    Field power = pointwise_power_modulus(low, params.k);
    Field prim = real_primitive(power, edge_tol);
    Field out(u_slice.grid);
    const double half_lambda = 0.5 * params.lambda;
    for (int i = 0; i < out.grid.nx; ++i)
        out[i] = std::exp(cplx{0.0, -half_lambda * prim[i].real()});
    return out;
}

SpacetimeField gauge_transform(const SpacetimeField& u, const GaugeParams& params,
                               const WindowFamily& w, double edge_tol) {
    params.validate(true);
    SpacetimeField v;
    v.grid = u.grid;
    v.level_spacing = u.level_spacing;
    v.levels.reserve(u.levels.size());
    for (int l = 0; l < u.steps(); ++l) {
        Field phase = gauge_phase(u.slice(l), params, w, edge_tol);
        Field pn = project(u.slice(l), params.n, w);
        Field out(u.grid);
        for (int i = 0; i < u.grid.nx; ++i) out[i] = phase[i] * pn[i];
        v.levels.push_back(std::move(out));
    }
    return v;
}

GaugeTermSet gauge_terms(const SpacetimeField& u, const GaugeParams& params,
                         const WindowFamily& w, GaugeTermOptions opts) {
    params.validate(true);
    const double k = params.k;
    const double lambda = params.lambda;
    if (k < 4.0 && k != 2.0)
        throw KBelowFour("gauge_terms: |P_<<N u|^{k-4} needs k >= 4");
    const double n = params.n.value();
    GaugeTermSet set;
    for (auto& t : set.terms) {
        t.grid = u.grid;
        t.level_spacing = u.level_spacing;
        t.levels.reserve(u.levels.size());
    }

    for (int l = 0; l < u.steps(); ++l) {
        const Field& slice = u.slice(l);
        Field wlow = project_region(slice, DyadicRelation::much_less, n, w);
        Field wlow_x = derivative(wlow);
        Field pn = project(slice, params.n, w);
        Field ux = derivative(slice);
        Field pn_ux = project(ux, params.n, w);
        Field phase = gauge_phase(slice, params, w, opts.edge_tol);

        const int nx = u.grid.nx;

        // |u|^k u_x and its band-N projection
        Field nl(u.grid);
        for (int i = 0; i < nx; ++i) nl[i] = guarded_pow(std::abs(slice[i]), k) * ux[i];
        Field pn_nl = project(nl, params.n, w);

        // I1 = -i lambda phase [ P_N(|u|^k u_x) - |w|^k P_N u_x ]
        Field i1(u.grid);
        for (int i = 0; i < nx; ++i) {
            const cplx bracket = pn_nl[i] - guarded_pow(std::abs(wlow[i]), k) * pn_ux[i];
            i1[i] = cplx{0.0, -lambda} * phase[i] * bracket;
        }

        // I2 integrand: |w|^{k-4} [ (conj(w_x) w)^2 - (w_x conj(w))^2 ]
        Field h2(u.grid);
        for (int i = 0; i < nx; ++i) {
            const double aw = std::abs(wlow[i]);
            if (aw <= kZeroGuard) { h2[i] = cplx{0.0, 0.0}; continue; }
            const cplx a = wlow_x[i] * std::conj(wlow[i]);
            const cplx abar = std::conj(a);
            h2[i] = guarded_pow(aw, k - 4.0) * (abar * abar - a * a);
        }
        Field b2 = primitive(h2, opts.edge_tol);
        Field i2(u.grid);
        const double c2 = lambda * k * (k - 2.0) / 8.0;
        for (int i = 0; i < nx; ++i) i2[i] = cplx{0.0, -c2} * phase[i] * pn[i] * b2[i];

        // I3 integrand (variant-dependent; see header)
        Field h3(u.grid);
        switch (opts.i3_variant) {
            case GaugeTermOptions::I3Variant::conjugate_pair: {
                Field plow_nl = project_region(nl, DyadicRelation::much_less, n, w);
                Field nl_bar(u.grid);
                for (int i = 0; i < nx; ++i)
                    nl_bar[i] = guarded_pow(std::abs(slice[i]), k) * std::conj(ux[i]);
                Field plow_nl_bar = project_region(nl_bar, DyadicRelation::much_less, n, w);
                for (int i = 0; i < nx; ++i)
                    h3[i] = guarded_pow(std::abs(wlow[i]), k - 2.0) *
                            (std::conj(wlow[i]) * plow_nl[i] + wlow[i] * plow_nl_bar[i]);
                break;
            }
            case GaugeTermOptions::I3Variant::projected_product: {
                Field prod(u.grid);
                for (int i = 0; i < nx; ++i)
                    prod[i] = guarded_pow(std::abs(slice[i]), k) * (ux[i] + std::conj(ux[i]));
                Field plow = project_region(prod, DyadicRelation::much_less, n, w);
                for (int i = 0; i < nx; ++i)
                    h3[i] = guarded_pow(std::abs(wlow[i]), k - 2.0) * plow[i];
                break;
            }
            case GaugeTermOptions::I3Variant::split_product: {
                Field powk(u.grid);
                for (int i = 0; i < nx; ++i)
                    powk[i] = cplx{guarded_pow(std::abs(slice[i]), k), 0.0};
                Field plow = project_region(powk, DyadicRelation::much_less, n, w);
                for (int i = 0; i < nx; ++i)
                    h3[i] = guarded_pow(std::abs(wlow[i]), k - 2.0) * plow[i] *
                            (ux[i] + std::conj(ux[i]));
                break;
            }
        }
        Field b3 = primitive(h3, opts.edge_tol);
        Field i3(u.grid);
        const double c3 = lambda * lambda * k / 4.0;
        for (int i = 0; i < nx; ++i) i3[i] = -c3 * phase[i] * pn[i] * b3[i];

        // I4 = (i lambda k / 2) phase |w|^{k-2} P_N u  w conj(w_x)
        Field i4(u.grid);
        const double c4 = lambda * k / 2.0;
        for (int i = 0; i < nx; ++i)
            i4[i] = cplx{0.0, c4} * phase[i] * guarded_pow(std::abs(wlow[i]), k - 2.0) * pn[i] *
                    wlow[i] * std::conj(wlow_x[i]);

        // I5 = (lambda^2 / 4) phase |w|^{2k} P_N u
        Field i5(u.grid);
        const double c5 = 0.25 * lambda * lambda;
        for (int i = 0; i < nx; ++i)
            i5[i] = c5 * phase[i] * guarded_pow(std::abs(wlow[i]), 2.0 * k) * pn[i];

        set.terms[0].levels.push_back(std::move(i1));
        set.terms[1].levels.push_back(std::move(i2));
        set.terms[2].levels.push_back(std::move(i3));
        set.terms[3].levels.push_back(std::move(i4));
        set.terms[4].levels.push_back(std::move(i5));
    }
    return set;
}

namespace {

// 4th-order centered first derivative in the level direction.
Field time_derivative(const SpacetimeField& v, int l) {
    const double h = v.level_spacing;
    Field out(v.grid);
    const Field& m2 = v.slice(l - 2);
    const Field& m1 = v.slice(l - 1);
    const Field& p1 = v.slice(l + 1);
    const Field& p2 = v.slice(l + 2);
    for (int i = 0; i < v.grid.nx; ++i)
        out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
    return out;
}

Field second_space_derivative(const Field& f) {
    return apply_multiplier(f, [](double xi) -> cplx { return -xi * xi; });
}

} // namespace

double gauge_residual(const SpacetimeField& u, const GaugeParams& params, const WindowFamily& w,
                      GaugeTermOptions opts) {
    if (u.steps() < 5)
        throw TooFewTimeLevels("gauge_residual: need at least 5 stored levels");
    SpacetimeField v = gauge_transform(u, params, w, opts.edge_tol);
    GaugeTermSet terms = gauge_terms(u, params, w, opts);
    SpacetimeField forcing = terms.sum();

    long double num = 0.0L, den = 0.0L;
    for (int l = 2; l < u.steps() - 2; ++l) {
        Field vt = time_derivative(v, l);
        Field vxx = second_space_derivative(v.slice(l));
        const Field& f = forcing.slice(l);
        long double slice_num = 0.0L, slice_den = 0.0L;
        for (int i = 0; i < u.grid.nx; ++i) {
            const cplx r = cplx{0.0, 1.0} * vt[i] - vxx[i] - f[i];
            slice_num += std::norm(r);
            slice_den += std::norm(v.slice(l)[i]);
        }
        num += slice_num;
        den += slice_den;
    }
    if (den == 0.0L) return 0.0;
    return std::sqrt(static_cast<double>(num / den));
}

SpacetimeField duhamel_integral(const SpacetimeField& forcing) {
    // Work in frequency space: G(t) = e^{i t xi^2} int_0^t e^{-i tau xi^2}
    // fhat(tau) dtau, cumulative trapezoid over the stored levels.
    const int nl = forcing.steps();
    const int nx = forcing.grid.nx;
    const double h = forcing.level_spacing;
    std::vector<Spectrum> fhat;
    fhat.reserve(static_cast<std::size_t>(nl));
    for (int l = 0; l < nl; ++l) {
        Spectrum s = analyze(forcing.slice(l));
        const double t = forcing.time(l);
        for (int j = 0; j < nx; ++j) {
            const double xi = s.grid.xi(j);
            s[j] *= std::exp(cplx{0.0, -t * xi * xi});
        }
        fhat.push_back(std::move(s));
    }
    SpacetimeField out;
    out.grid = forcing.grid;
    out.level_spacing = h;
    Spectrum acc(forcing.grid);
    for (int l = 0; l < nl; ++l) {
        if (l > 0)
            for (int j = 0; j < nx; ++j)
                acc[j] += 0.5 * h * (fhat[static_cast<std::size_t>(l - 1)][j] +
                                     fhat[static_cast<std::size_t>(l)][j]);
        Spectrum s = acc;
        const double t = forcing.time(l);
        for (int j = 0; j < nx; ++j) {
            const double xi = s.grid.xi(j);
            s[j] *= std::exp(cplx{0.0, t * xi * xi});
        }
        out.levels.push_back(synthesize(s));
    }
    return out;
}

double duhamel_mismatch(const SpacetimeField& u, const GaugeParams& params, double t,
                        const WindowFamily& w, GaugeTermOptions opts) {
    if (u.steps() < 2) throw TooFewTimeLevels("duhamel_mismatch: need stored levels");
    const double h = u.level_spacing;
    const double idx = t / h;
    const int l = static_cast<int>(std::lround(idx));
    if (l < 0 || l >= u.steps() || std::abs(idx - l) > 1e-9)
        throw ConfigInvalid("duhamel_mismatch: t must align with a stored level");
    if (l == 0) return 0.0; // S(0) = I and the integral is empty
    SpacetimeField v = gauge_transform(u, params, w, opts.edge_tol);
    GaugeTermSet terms = gauge_terms(u, params, w, opts);
    SpacetimeField duh = duhamel_integral(terms.sum());

    Field free = propagate(v.slice(0), t);
    long double num = 0.0L, den = 0.0L;
    for (int i = 0; i < u.grid.nx; ++i) {
        const cplx r = v.slice(l)[i] - free[i] + cplx{0.0, 1.0} * duh.slice(l)[i];
        num += std::norm(r);
        den += std::norm(v.slice(l)[i]);
    }
    if (den == 0.0L) return 0.0;
    return std::sqrt(static_cast<double>(num / den));
}

double fourier_mass_outside(const SpacetimeField& term, double cutoff_xi) {
    long double outside = 0.0L, total = 0.0L;
    for (int l = 0; l < term.steps(); ++l) {
        Spectrum s = analyze(term.slice(l));
        for (int j = 0; j < s.grid.nx; ++j) {
            const long double m = std::norm(s[j]);
            total += m;
            if (std::abs(s.grid.xi(j)) > cutoff_xi) outside += m;
        }
    }
    if (total == 0.0L) return 0.0;
    return static_cast<double>(std::sqrt(outside / total));
}

} // namespace dnls
