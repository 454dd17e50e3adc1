#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/spectral.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

GridSpec small_grid(int nx = 64, double length = 2.0 * M_PI) {
    return make_grid(nx, length, 1e-3, 1e-3);
}

Field single_mode(const GridSpec& g, int m, cplx amp = {1.0, 0.0}) {
    Field f(g);
    const double xi = 2.0 * M_PI * m / g.length;
    for (int i = 0; i < g.nx; ++i) f[i] = amp * std::exp(cplx{0.0, xi * g.x(i)});
    return f;
}

double rel_diff(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.grid.nx; ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0 ? num / den : num;
}

} // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(make_grid(48, 1.0, 1e-3, 1e-3), ConfigInvalid);     // not a power of two
    CHECK_THROWS_AS(make_grid(8, 1.0, 1e-3, 1e-3), ConfigInvalid);      // too small
    CHECK_THROWS_AS(make_grid(64, -1.0, 1e-3, 1e-3), ConfigInvalid);
    CHECK_THROWS_AS(make_grid(64, 1.0, 2e-3, 1e-3), ConfigInvalid);     // dt > horizon
    CHECK_THROWS_AS(make_grid(64, 1.0, 3e-4, 1e-3), ConfigInvalid);     // non-integral steps
    CHECK_THROWS_AS(make_grid(64, 1.0, 1e-3, 1e-3, 1.5), ConfigInvalid);
    const GridSpec g = make_grid(64, 1.0, 2.5e-4, 1e-3);
    CHECK(g.steps() == 4);
}

TEST_CASE("analysis of constants and single modes") {
    const GridSpec g = small_grid();
    Field c(g, cplx{2.5, -1.0});
    Spectrum s = analyze(c);
    CHECK(std::abs(s[0] - cplx{2.5, -1.0} * g.length) < 1e-12 * g.length);
    for (int j = 1; j < g.nx; ++j) CHECK(std::abs(s[j]) < 1e-13 * std::abs(cplx{2.5, -1.0}));

    Spectrum s1 = analyze(single_mode(g, 1));
    for (int j = 0; j < g.nx; ++j) {
        if (j == 1)
            CHECK(std::abs(s1[j] - g.length) < 1e-10);
        else
            CHECK(std::abs(s1[j]) < 1e-10);
    }
}

TEST_CASE("round trip and Plancherel") {
    const GridSpec g = small_grid(128, 40.0);
    Field f = oracle::random_field(g, 40, 11);
    Field back = synthesize(analyze(f));
    CHECK(rel_diff(back, f) < 1e-12);

    Spectrum s = analyze(f);
    long double grid_l2 = 0.0L, spec_l2 = 0.0L;
    for (int i = 0; i < g.nx; ++i) grid_l2 += std::norm(f[i]);
    for (int j = 0; j < g.nx; ++j) spec_l2 += std::norm(s[j]);
    grid_l2 *= g.dx();
    spec_l2 /= g.length;
    CHECK(std::abs(static_cast<double>(grid_l2 - spec_l2)) < 1e-12 * static_cast<double>(grid_l2));
}

TEST_CASE("fractional derivative examples") {
    const GridSpec g = small_grid();
    // D_x^{1/2} e^{i4x} = 2 e^{i4x} on the 2*pi torus
    Field f = single_mode(g, 4);
    Field d = fractional_derivative(f, 0.5, DerivativeKind::homogeneous);
    Field expected = single_mode(g, 4, cplx{2.0, 0.0});
    CHECK(rel_diff(d, expected) < 1e-12);

    // <D>^0 is the identity on Nyquist-free fields
    Field r = oracle::random_field(g, 20, 3);
    CHECK(rel_diff(fractional_derivative(r, 0.0, DerivativeKind::inhomogeneous), r) < 1e-12);

    // <D>^{1/2} of a constant is the constant
    Field c(g, cplx{0.7, 0.1});
    CHECK(rel_diff(fractional_derivative(c, 0.5, DerivativeKind::inhomogeneous), c) < 1e-12);

    // negative homogeneous order requires zero mean
    CHECK_THROWS_AS(fractional_derivative(c, -0.5, DerivativeKind::homogeneous),
                    NegativeHomogeneousOnMeanful);
    CHECK_THROWS_AS(fractional_derivative(c, -1.5, DerivativeKind::homogeneous),
                    std::invalid_argument);
    Field zm = single_mode(g, 3);
    Field dm = fractional_derivative(zm, -0.5, DerivativeKind::homogeneous);
    CHECK(rel_diff(dm, single_mode(g, 3, cplx{1.0 / std::sqrt(3.0), 0.0})) < 1e-12);
}

TEST_CASE("homogeneous order is dominated by the inhomogeneous one") {
    // |xi|^a <= <xi>^a pointwise, so every L^p norm of D^a f sits below
    // the <D>^a one (the trivial half of the gauge Leibniz rule).
    const GridSpec g = small_grid(128, 30.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Field f = oracle::random_field(g, 40, 200 + seed);
        for (double a : {0.25, 0.5, 0.75}) {
            Field hom = fractional_derivative(f, a, DerivativeKind::homogeneous);
            Field inhom = fractional_derivative(f, a, DerivativeKind::inhomogeneous);
            CHECK(l2_norm(hom) <= l2_norm(inhom) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("multiplier composition") {
    const GridSpec g = small_grid(128, 30.0);
    Field f = oracle::random_field(g, 30, 5);
    Field a = fractional_derivative(fractional_derivative(f, 0.3, DerivativeKind::inhomogeneous),
                                    0.9, DerivativeKind::inhomogeneous);
    Field b = fractional_derivative(f, 1.2, DerivativeKind::inhomogeneous);
    CHECK(rel_diff(a, b) < 1e-12);
}

TEST_CASE("propagator") {
    const GridSpec g = small_grid();
    Field f = oracle::random_field(g, 20, 7);

    CHECK(rel_diff(propagate(f, 0.0), f) < 1e-13);

    Field one = single_mode(g, 1);
    Field p = propagate(one, 0.37);
    Field expected = single_mode(g, 1, std::exp(cplx{0.0, 0.37}));
    CHECK(rel_diff(p, expected) < 1e-12);

    CHECK(std::abs(l2_norm(propagate(f, 0.37)) - l2_norm(f)) < 1e-12 * l2_norm(f));

    Field two_step = propagate(propagate(f, 0.21), 0.16);
    CHECK(rel_diff(two_step, propagate(f, 0.37)) < 1e-12);
}

TEST_CASE("primitive against trapezoid and closed forms") {
    const GridSpec g = small_grid(256, 2.0 * M_PI);
    // cosine: mean-free, edge value 1 (pass an explicit tolerance)
    Field f(g);
    for (int i = 0; i < g.nx; ++i) f[i] = cplx{std::cos(g.x(i)), 0.0};
    Field f_int = primitive(f, 2.0);
    CHECK(std::abs(f_int[0]) < 1e-14);
    auto trap = oracle::cumulative_trapezoid(f);
    for (int i = 0; i < g.nx; ++i)
        CHECK(std::abs(f_int[i] - trap[static_cast<std::size_t>(i)]) < 1e-4); // trapezoid is O(h^2)
    for (int i = 0; i < g.nx; ++i)
        CHECK(std::abs(f_int[i] - cplx{std::sin(g.x(i)), 0.0}) < 1e-12);

    // zero integrand
    Field z(g);
    Field zi = primitive(z);
    for (int i = 0; i < g.nx; ++i) CHECK(std::abs(zi[i]) == 0.0);

    // narrow Gaussian against the erf closed form
    const GridSpec gg = make_grid(1024, 60.0, 1e-3, 1e-3);
    const double w = 1.5;
    Field gauss(gg);
    for (int i = 0; i < gg.nx; ++i) {
        const double r = gg.x(i) / w;
        gauss[i] = cplx{std::exp(-r * r), 0.0};
    }
    Field gi = primitive(gauss);
    const double full = w * std::sqrt(M_PI) * std::erf(gg.length / (2.0 * w));
    CHECK(std::abs(gi[gg.nx - 1].real() - full) < 1e-8);

    // spectral derivative recovers a mean-free integrand (for nonzero mean
    // the primitive carries a non-periodic ramp, so the pair only closes on
    // the periodic part)
    Field dgauss(gg);
    for (int i = 0; i < gg.nx; ++i) {
        const double x = gg.x(i);
        dgauss[i] = cplx{-2.0 * x / (w * w) * std::exp(-x * x / (w * w)), 0.0};
    }
    Field rec = derivative(primitive(dgauss));
    for (int i = 0; i < gg.nx; ++i) CHECK(std::abs(rec[i] - dgauss[i]) < 1e-8);

    // edge decay enforcement
    Field bad(gg, cplx{1.0, 0.0});
    CHECK_THROWS_AS(primitive(bad), EdgeDecayViolation);
}

TEST_CASE("pointwise modulus powers") {
    const GridSpec g = small_grid();
    Field two(g, cplx{2.0, 0.0});
    Field p = pointwise_power_modulus(two, 5.0);
    for (int i = 0; i < g.nx; ++i) CHECK(p[i].real() == doctest::Approx(32.0).epsilon(1e-14));

    Field z(g);
    Field pz = pointwise_power_modulus(z, 5.5);
    for (int i = 0; i < g.nx; ++i) CHECK(pz[i] == cplx{0.0, 0.0});

    Field mode = single_mode(g, 5);
    Field pm = pointwise_power_modulus(mode, 3.7);
    for (int i = 0; i < g.nx; ++i) CHECK(pm[i].real() == doctest::Approx(1.0).epsilon(1e-12));

    Field p0 = pointwise_power_modulus(z, 0.0);
    for (int i = 0; i < g.nx; ++i) CHECK(p0[i] == cplx{1.0, 0.0});
}
