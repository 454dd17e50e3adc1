#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/estimates.hpp"
#include "dnls/norms.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

SpacetimeField constant_spacetime(const GridSpec& g, double T, int levels, cplx value) {
    SpacetimeField u;
    u.grid = g;
    u.level_spacing = T / (levels - 1);
    for (int l = 0; l < levels; ++l) u.levels.emplace_back(g, value);
    return u;
}

} // namespace

TEST_CASE("mixed norm of constants") {
    const GridSpec g = make_grid(64, 10.0, 1e-3, 1e-3);
    const double T = 0.5;
    SpacetimeField u = constant_spacetime(g, T, 33, cplx{3.0, 0.0});
    for (double p : {1.0, 2.0, 4.0, kInfinity}) {
        for (double q : {1.0, 2.0, kInfinity}) {
            const double lp = p == kInfinity ? 1.0 : std::pow(g.length, 1.0 / p);
            const double lq = q == kInfinity ? 1.0 : std::pow(T, 1.0 / q);
            CHECK(mixed_norm(u, MixedNormSpec::lx_lt(p, q)) ==
                  doctest::Approx(3.0 * lp * lq).epsilon(1e-12));
            CHECK(mixed_norm(u, MixedNormSpec::lt_lx(q, p)) ==
                  doctest::Approx(3.0 * lp * lq).epsilon(1e-12));
        }
    }
}

TEST_CASE("both orders agree at p = q = 2") {
    const GridSpec g = make_grid(128, 20.0, 1e-3, 1e-3);
    SpacetimeField u = free_evolution(oracle::random_field(g, 40, 3), 0.3, 17);
    const double a = mixed_norm(u, MixedNormSpec::lx_lt(2.0, 2.0));
    const double b = mixed_norm(u, MixedNormSpec::lt_lx(2.0, 2.0));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("separable fields factor") {
    const GridSpec g = make_grid(128, 20.0, 1e-3, 1e-3);
    const double T = 0.4;
    const int levels = 41;
    auto a = [](double t) { return 1.0 + 0.5 * std::sin(7.0 * t); };
    Field b(g);
    for (int i = 0; i < g.nx; ++i) {
        const double r = g.x(i) / 3.0;
        b[i] = cplx{std::exp(-r * r), 0.4 * std::cos(g.x(i))};
    }
    SpacetimeField u;
    u.grid = g;
    u.level_spacing = T / (levels - 1);
    for (int l = 0; l < levels; ++l) {
        Field s(g);
        const double at = a(u.level_spacing * l);
        for (int i = 0; i < g.nx; ++i) s[i] = at * b[i];
        u.levels.push_back(std::move(s));
    }
    for (double p : {2.0, 4.0}) {
        for (double q : {2.0, kInfinity}) {
            double aq;
            if (q == kInfinity) {
                aq = 0.0;
                for (int l = 0; l < levels; ++l) aq = std::max(aq, a(u.level_spacing * l));
            } else {
                // trapezoid on the same sampling as the library
                long double acc = 0.0L;
                for (int l = 0; l < levels; ++l) {
                    const double w = (l == 0 || l == levels - 1) ? 0.5 : 1.0;
                    acc += w * u.level_spacing * std::pow(a(u.level_spacing * l), q);
                }
                aq = std::pow(static_cast<double>(acc), 1.0 / q);
            }
            const double bp = lp_norm(b, p);
            CHECK(mixed_norm(u, MixedNormSpec::lx_lt(p, q)) ==
                  doctest::Approx(aq * bp).epsilon(1e-10));
            CHECK(mixed_norm(u, MixedNormSpec::lt_lx(q, p)) ==
                  doctest::Approx(aq * bp).epsilon(1e-10));
        }
    }
}

TEST_CASE("sobolev norms") {
    const GridSpec g2pi = make_grid(64, 2.0 * M_PI, 1e-3, 1e-3);
    Field c(g2pi, cplx{2.0, 0.0});
    CHECK(sobolev_norm(c, 0.0) == doctest::Approx(2.0 * std::sqrt(2.0 * M_PI)).epsilon(1e-12));

    Field mode(g2pi);
    for (int i = 0; i < g2pi.nx; ++i) mode[i] = std::exp(cplx{0.0, 4.0 * g2pi.x(i)});
    CHECK(sobolev_norm(mode, 0.5) ==
          doctest::Approx(std::pow(17.0, 0.25) * l2_norm(mode)).epsilon(1e-12));

    // Gaussian H^{1/2} against direct quadrature of the continuum transform
    const GridSpec g = make_grid(2048, 100.0, 1e-3, 1e-3);
    const double w = 2.0;
    Field gauss(g);
    for (int i = 0; i < g.nx; ++i) {
        const double r = g.x(i) / w;
        gauss[i] = cplx{std::exp(-r * r), 0.0};
    }
    const double measured = sobolev_norm(gauss, 0.5);
    auto integrand = [w](double xi) {
        const double fhat = w * std::sqrt(M_PI) * std::exp(-w * w * xi * xi / 4.0);
        return std::sqrt(1.0 + xi * xi) * fhat * fhat / (2.0 * M_PI);
    };
    const double wanted = std::sqrt(oracle::quadrature(integrand, -40.0, 40.0, 400000));
    CHECK(measured == doctest::Approx(wanted).epsilon(1e-8));

    CHECK_THROWS_AS(sobolev_norm(c, -0.5, true), NegativeHomogeneousOnMeanful);
}

TEST_CASE("norm axioms") {
    const GridSpec g = make_grid(128, 20.0, 1e-3, 1e-3);
    SpacetimeField u = free_evolution(oracle::random_field(g, 40, 5), 0.3, 17);
    SpacetimeField v = free_evolution(oracle::random_field(g, 40, 6), 0.3, 17);
    SpacetimeField sum = u;
    for (int l = 0; l < u.steps(); ++l)
        for (int i = 0; i < g.nx; ++i) sum.slice(l)[i] += v.slice(l)[i];
    SpacetimeField scaled = u;
    for (int l = 0; l < u.steps(); ++l)
        for (int i = 0; i < g.nx; ++i) scaled.slice(l)[i] *= cplx{-2.0, 0.0};

    for (double p : {2.0, 4.0, kInfinity}) {
        for (double q : {2.0, kInfinity}) {
            const MixedNormSpec spec = MixedNormSpec::lx_lt(p, q);
            CHECK(mixed_norm(scaled, spec) ==
                  doctest::Approx(2.0 * mixed_norm(u, spec)).epsilon(1e-12));
            CHECK(mixed_norm(sum, spec) <=
                  mixed_norm(u, spec) + mixed_norm(v, spec) + 1e-12);
        }
    }

    // time restriction never increases a norm
    SpacetimeField shorter = restrict_horizon(u, 0.15);
    for (double p : {2.0, kInfinity}) {
        CHECK(mixed_norm(shorter, MixedNormSpec::lx_lt(p, 2.0)) <=
              mixed_norm(u, MixedNormSpec::lx_lt(p, 2.0)) + 1e-12);
        CHECK(mixed_norm(shorter, MixedNormSpec::lx_lt(p, kInfinity)) <=
              mixed_norm(u, MixedNormSpec::lx_lt(p, kInfinity)) + 1e-12);
    }
}

TEST_CASE("square-sum Minkowski inequality") {
    const GridSpec g = make_grid(256, 20.0, 1e-3, 1e-3);
    WindowFamily w = WindowFamily::build(g);
    SpacetimeField u = free_evolution(oracle::random_field(g, 100, 9), 0.3, 17);

    for (double p : {2.0, 4.0, kInfinity}) {
        for (double q : {2.0, 4.0, kInfinity}) {
            SpacetimeField sq;
            sq.grid = g;
            sq.level_spacing = u.level_spacing;
            std::vector<SpacetimeField> blocks;
            for (const DyadicIndex& idx : w.indices()) blocks.push_back(project(u, idx, w));
            for (int l = 0; l < u.steps(); ++l) {
                Field s(g);
                for (int i = 0; i < g.nx; ++i) {
                    double acc = 0.0;
                    for (const auto& b : blocks) acc += std::norm(b.slice(l)[i]);
                    s[i] = cplx{std::sqrt(acc), 0.0};
                }
                sq.levels.push_back(std::move(s));
            }
            const double lhs = mixed_norm(sq, MixedNormSpec::lt_lx(q, p));
            long double acc = 0.0L;
            for (const auto& b : blocks) {
                const double n = mixed_norm(b, MixedNormSpec::lt_lx(q, p));
                acc += static_cast<long double>(n) * n;
            }
            CHECK(lhs <= std::sqrt(static_cast<double>(acc)) + 1e-10);
        }
    }
}

TEST_CASE("X_T pieces") {
    const GridSpec g = make_grid(256, 50.0, 1e-3, 1e-3);
    WindowFamily w = WindowFamily::build(g);

    SpacetimeField zero = constant_spacetime(g, 0.2, 9, cplx{0.0, 0.0});
    XtNormBreakdown zb = xt_norm(zero, w);
    CHECK(zb.total == 0.0);

    // free flow preserves each |uhat|, so the sup-Sobolev piece is the data norm
    InitialData ic;
    ic.amplitude = 1.0;
    ic.width = 2.0;
    Field phi = ic.realize(g);
    SpacetimeField u = free_evolution(phi, 0.2, 33);
    XtNormBreakdown xb = xt_norm(u, w);
    CHECK(xb.sup_sobolev == doctest::Approx(sobolev_norm(phi, 0.5)).epsilon(1e-10));
    CHECK(xb.total == doctest::Approx(xb.sup_sobolev + xb.smoothing + xb.maximal_l2 +
                                      xb.maximal_l4).epsilon(1e-12));

    // single-band data: only neighbouring blocks contribute to the dyadic sums
    Field banded = project(oracle::random_field(g, 120, 12), DyadicIndex::band(2), w);
    SpacetimeField ub = free_evolution(banded, 0.2, 17);
    double outside = 0.0;
    for (const DyadicIndex& idx : w.indices()) {
        if (!idx.is_low() && std::abs(idx.j - 2) <= 1) continue;
        SpacetimeField block = project(ub, idx, w);
        outside = std::max(outside, mixed_norm(block, MixedNormSpec::lx_lt(2.0, kInfinity)));
    }
    CHECK(outside < 1e-12 * mixed_norm(ub, MixedNormSpec::lx_lt(2.0, kInfinity)));
}

TEST_CASE("Y_T against brute force") {
    const GridSpec g = make_grid(256, 50.0, 1e-3, 1e-3);
    InitialData ic;
    ic.amplitude = 0.8;
    ic.width = 3.0;
    SpacetimeField v = free_evolution(ic.realize(g), 0.25, 21);

    YtNormBreakdown yb = yt_norm_breakdown(v);
    CHECK(yb.total == doctest::Approx(yb.sup_sobolev + yb.smoothing + yb.maximal_l2 +
                                      yb.maximal_l4).epsilon(1e-12));

    // brute-force the three mixed pieces with nested loops
    SpacetimeField dxv = v, qv = v;
    for (int l = 0; l < v.steps(); ++l) {
        dxv.slice(l) = derivative(v.slice(l));
        qv.slice(l) = fractional_derivative(v.slice(l), 0.25, DerivativeKind::inhomogeneous);
    }
    CHECK(yb.smoothing == doctest::Approx(oracle::brute_mixed(dxv).linf_l2).epsilon(1e-10));
    CHECK(yb.maximal_l2 == doctest::Approx(oracle::brute_mixed(v).l2_linf).epsilon(1e-10));
    CHECK(yb.maximal_l4 == doctest::Approx(oracle::brute_mixed(qv).l4_linf).epsilon(1e-10));

    SpacetimeField zero = constant_spacetime(g, 0.2, 5, cplx{0.0, 0.0});
    CHECK(yt_norm(zero) == 0.0);
}

TEST_CASE("X_T homogeneity") {
    const GridSpec g = make_grid(128, 30.0, 1e-3, 1e-3);
    WindowFamily w = WindowFamily::build(g);
    SpacetimeField u = free_evolution(oracle::random_field(g, 40, 15), 0.2, 17);
    SpacetimeField two = u;
    for (int l = 0; l < u.steps(); ++l)
        for (int i = 0; i < g.nx; ++i) two.slice(l)[i] *= 2.0;
    CHECK(xt_norm(two, w).total == doctest::Approx(2.0 * xt_norm(u, w).total).epsilon(1e-12));
    CHECK(yt_norm(two) == doctest::Approx(2.0 * yt_norm(u)).epsilon(1e-12));
}
