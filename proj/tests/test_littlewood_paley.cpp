#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dnls/littlewood_paley.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

GridSpec grid_2pi(int nx = 256) { return make_grid(nx, 2.0 * M_PI, 1e-3, 1e-3); }

double rel_diff(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.grid.nx; ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0 ? num / den : num;
}

} // namespace

TEST_CASE("window profile axioms") {
    CHECK(WindowFamily::psi(0.0) == 1.0);
    CHECK(WindowFamily::psi(0.5) == 1.0);
    CHECK(WindowFamily::psi(1.0) == 1.0);
    CHECK(WindowFamily::psi(2.0) == 0.0);
    CHECK(WindowFamily::psi(2.5) == 0.0);
    CHECK(WindowFamily::psi(-0.7) == WindowFamily::psi(0.7));
    CHECK(WindowFamily::phi(1.0) == doctest::Approx(1.0));
    for (double xi : {0.1, 0.3, 0.49}) CHECK(WindowFamily::phi(xi) == 0.0);
    for (double xi : {2.0, 2.5, 10.0}) CHECK(WindowFamily::phi(xi) == 0.0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const double xi = 6.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 3.0;
        const double p = WindowFamily::psi(xi);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(WindowFamily::phi(xi) >= -1e-15);
    }
}

TEST_CASE("partition of unity on sampled frequencies") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);
    CHECK(w.nyquist_cap() == 64.0); // xi_max = 128, half = 64
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(g.nx));
        const double xi = g.xi(j);
        double acc = 0.0;
        for (const DyadicIndex& idx : w.indices()) acc += w.window(idx, xi);
        CHECK(std::abs(acc - 1.0) < 1e-12);
    }
}

TEST_CASE("reconstruction identity") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Field f = oracle::random_field(g, g.nx / 2 - 1, seed + 100);
        Field sum(g);
        for (const DyadicIndex& idx : w.indices()) {
            Field p = project(f, idx, w);
            for (int i = 0; i < g.nx; ++i) sum[i] += p[i];
        }
        CHECK(rel_diff(sum, f) < 1e-12);
    }
}

TEST_CASE("projection of special fields") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);

    Field c(g, cplx{1.5, 0.5});
    CHECK(rel_diff(project(c, DyadicIndex::low(), w), c) < 1e-13);
    for (int j = 0; j <= w.max_band_exponent(); ++j) {
        Field b = project(c, DyadicIndex::band(j), w);
        for (int i = 0; i < g.nx; ++i) CHECK(std::abs(b[i]) < 1e-13);
    }

    // phi(1) = 1: the band reproduces its center mode
    Field mode(g);
    const double n = 8.0;
    for (int i = 0; i < g.nx; ++i) mode[i] = std::exp(cplx{0.0, n * g.x(i)});
    CHECK(rel_diff(project(mode, DyadicIndex::band(3), w), mode) < 1e-12);

    CHECK_THROWS_AS(project(mode, DyadicIndex::band(20), w), BandAboveNyquist);
}

TEST_CASE("region conventions") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);
    Field f = oracle::random_field(g, 100, 23);

    // full range reproduces the field
    CHECK(rel_diff(project_region(f, DyadicRelation::lesssim, w.nyquist_cap(), w), f) < 1e-12);

    // much_less at N excludes the band at N (M <= N/4 convention)
    Field mode(g);
    for (int i = 0; i < g.nx; ++i) mode[i] = std::exp(cplx{0.0, 8.0 * g.x(i)});
    Field excluded = project_region(mode, DyadicRelation::much_less, 8.0, w);
    for (int i = 0; i < g.nx; ++i) CHECK(std::abs(excluded[i]) < 1e-13);

    // sim with width-one tilde: P_{N/2} + P_N + P_{2N}
    Field via_region = project_region(f, DyadicRelation::sim, 8.0, w);
    Field via_tilde = tilde_project(f, 8.0, w, TildeWidth::one);
    CHECK(rel_diff(via_region, via_tilde) < 1e-13);

    // complements: much_less + gtrsim = identity, lesssim + much_greater = identity
    for (double n : {4.0, 16.0}) {
        Field a = project_region(f, DyadicRelation::much_less, n, w);
        Field b = project_region(f, DyadicRelation::gtrsim, n, w);
        Field sum(g);
        for (int i = 0; i < g.nx; ++i) sum[i] = a[i] + b[i];
        CHECK(rel_diff(sum, f) < 1e-12);
        Field c2 = project_region(f, DyadicRelation::lesssim, n, w);
        Field d = project_region(f, DyadicRelation::much_greater, n, w);
        for (int i = 0; i < g.nx; ++i) sum[i] = c2[i] + d[i];
        CHECK(rel_diff(sum, f) < 1e-12);
    }

    // wider tilde reproduces the band: tilde_P_N P_N = P_N
    Field band = project(f, DyadicIndex::band(3), w);
    CHECK(rel_diff(tilde_project(band, 8.0, w, TildeWidth::two), band) < 1e-12);
}

TEST_CASE("almost orthogonality and square function") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);
    Field f = oracle::random_field(g, 100, 31);

    for (int j = 0; j + 2 <= w.max_band_exponent(); ++j) {
        Field once = project(f, DyadicIndex::band(j), w);
        Field twice = project(once, DyadicIndex::band(j + 2), w);
        for (int i = 0; i < g.nx; ++i) CHECK(std::abs(twice[i]) < 1e-13);
    }

    for (std::uint64_t seed = 50; seed < 55; ++seed) {
        Field r = oracle::random_field(g, 100, seed);
        const double total = l2_norm(r);
        long double acc = 0.0L;
        for (const DyadicIndex& idx : w.indices()) {
            const double b = l2_norm(project(r, idx, w));
            acc += static_cast<long double>(b) * b;
        }
        const double sq = static_cast<double>(acc);
        CHECK(sq >= total * total / 3.0);
        CHECK(sq <= 3.0 * total * total);
    }
}

TEST_CASE("projections commute with multipliers") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);
    Field f = oracle::random_field(g, 100, 41);
    const DyadicIndex idx = DyadicIndex::band(4);

    Field a = project(fractional_derivative(f, 0.5, DerivativeKind::inhomogeneous), idx, w);
    Field b = fractional_derivative(project(f, idx, w), 0.5, DerivativeKind::inhomogeneous);
    CHECK(rel_diff(a, b) < 1e-12);

    Field c = project(propagate(f, 0.2), idx, w);
    Field d = propagate(project(f, idx, w), 0.2);
    CHECK(rel_diff(c, d) < 1e-12);
}

TEST_CASE("Bernstein ratios") {
    const GridSpec g = grid_2pi();
    WindowFamily w = WindowFamily::build(g);

    Field mode(g);
    for (int i = 0; i < g.nx; ++i) mode[i] = std::exp(cplx{0.0, 8.0 * g.x(i)});
    CHECK(bernstein_ratio(mode, DyadicIndex::band(3), 1.0, 2.0, w) == doctest::Approx(1.0));

    // band-limited: ratio <= 2 for s=1, p=2 (support |xi| <= 2N)
    for (std::uint64_t seed = 60; seed < 70; ++seed) {
        Field f = oracle::random_field(g, 100, seed);
        const double r = bernstein_ratio(f, DyadicIndex::band(3), 1.0, 2.0, w);
        CHECK(r <= 2.0 + 1e-12);
        CHECK(r >= 0.5 - 1e-12); // lower Bernstein: support |xi| >= N/2
    }

    // s = 1/2, p = 4 family: recorded bound
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Field f = oracle::random_field(g, 100, 1000 + seed);
        worst = std::max(worst, bernstein_ratio(f, DyadicIndex::band(4), 0.5, 4.0, w));
    }
    CHECK(worst <= 4.0);

    Field zero(g);
    CHECK_THROWS_AS(bernstein_ratio(zero, DyadicIndex::band(3), 1.0, 2.0, w), ZeroBand);
}

TEST_CASE("coarse grids are rejected") {
    CHECK_THROWS_AS(WindowFamily::build(make_grid(16, 100.0, 1e-3, 1e-3)), ResolutionTooCoarse);
    CHECK_NOTHROW(WindowFamily::build(make_grid(16, 2.0 * M_PI, 1e-3, 1e-3)));
}
