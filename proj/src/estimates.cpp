#include "dnls/estimates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace dnls {

namespace {

constexpr double kRhsError = 1e-14;     // below this with a live lhs: ZeroRhs
constexpr double kRhsExclude = 1e-10;   // below this with a dead lhs: skip member
constexpr double kLhsFloor = 1e-10;

// Per-member deterministic draws, independent of the grid.
struct Draw {
    std::uint64_t state;
    explicit Draw(std::uint64_t seed, int index)
        : state(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1) {}
    double unit() {
        // splitmix64 step
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

void parallel_members(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

MemberResult make_result(int id, std::string params, double lhs, double rhs) {
    MemberResult r;
    r.id = id;
    r.params = std::move(params);
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs < kRhsError && lhs > kLhsFloor)
        throw ZeroRhs("estimate member " + std::to_string(id) + ": rhs ~ 0 but lhs = " + fmt(lhs));
    if (rhs < kRhsExclude && lhs <= kLhsFloor) r.included = false;
    if (!std::isfinite(lhs) || !std::isfinite(rhs))
        throw NonFiniteValue("estimate member " + std::to_string(id) + ": non-finite sides");
    return r;
}

SpacetimeField apply_bessel(const SpacetimeField& u, double s) {
    SpacetimeField out;
    out.grid = u.grid;
    out.level_spacing = u.level_spacing;
    out.levels.reserve(u.levels.size());
    for (const Field& f : u.levels)
        out.levels.push_back(fractional_derivative(f, s, DerivativeKind::inhomogeneous));
    return out;
}

SpacetimeField apply_dx(const SpacetimeField& u) {
    SpacetimeField out;
    out.grid = u.grid;
    out.level_spacing = u.level_spacing;
    out.levels.reserve(u.levels.size());
    for (const Field& f : u.levels) out.levels.push_back(derivative(f));
    return out;
}

double prime_exponent(double p) {
    if (p == kInfinity) return 1.0;
    if (p == 1.0) return kInfinity;
    return p / (p - 1.0);
}

} // namespace

double k_tilde(double k) {
    const double fl = std::floor(k);
    return (fl == k) ? k - 1.0 : fl;
}

InitialData TestFamily::member_data(int index) const {
    Draw d(seed, index);
    InitialData ic;
    switch (kind) {
        case Kind::gaussian_sweep:
        case Kind::solver_trajectory:
            ic.kind = InitialData::Kind::gaussian;
            ic.amplitude = d.in(amp_lo, amp_hi);
            ic.width = d.in(width_lo, width_hi);
            break;
        case Kind::modulated_sweep:
            ic.kind = InitialData::Kind::modulated_gaussian;
            ic.amplitude = d.in(amp_lo, amp_hi);
            ic.width = d.in(width_lo, width_hi);
            ic.modulation = (index % 2 ? 1.0 : -1.0) * d.in(mod_lo, mod_hi);
            break;
        case Kind::random_band:
            ic.kind = InitialData::Kind::random_band;
            ic.amplitude = d.in(amp_lo, amp_hi);
            ic.band_lo = band_lo;
            ic.band_hi = band_hi;
            ic.seed = seed * 2654435761ULL + static_cast<std::uint64_t>(index);
            break;
    }
    return ic;
}

std::string TestFamily::describe() const {
    const char* names[] = {"gaussian", "modulated", "random_band", "trajectory"};
    std::ostringstream os;
    os << names[static_cast<int>(kind)] << ":" << cardinality << ":seed=" << seed;
    return os.str();
}

XtNormOptions SuiteEnv::xt_options() const {
    XtNormOptions o;
    o.max_band_exponent = max_band_exponent;
    return o;
}

std::vector<DyadicIndex> SuiteEnv::dyadic_indices() const {
    std::vector<DyadicIndex> all = windows.indices();
    if (max_band_exponent < 0) return all;
    std::vector<DyadicIndex> out;
    for (const DyadicIndex& idx : all)
        if (idx.is_low() || idx.j <= max_band_exponent) out.push_back(idx);
    return out;
}

std::vector<DyadicIndex> SuiteEnv::high_bands() const {
    std::vector<DyadicIndex> out;
    const int top = max_band_exponent < 0 ? windows.max_band_exponent() : max_band_exponent;
    for (int j = 2; j <= top; ++j) out.push_back(DyadicIndex::band(j));
    return out;
}

SuiteEnv make_env(const GridSpec& grid, int levels, int jobs) {
    SuiteEnv env{grid, WindowFamily::build(grid), levels, -1, jobs};
    return env;
}

SpacetimeField free_evolution(const Field& phi, double T, int levels) {
    if (levels < 2) throw TooFewTimeLevels("free_evolution: need >= 2 levels");
    SpacetimeField out;
    out.grid = phi.grid;
    out.level_spacing = T / (levels - 1);
    Spectrum s = analyze(phi);
    for (int l = 0; l < levels; ++l) {
        const double t = out.level_spacing * l;
        Spectrum sl = s;
        for (int j = 0; j < s.grid.nx; ++j) {
            const double xi = s.grid.xi(j);
            sl[j] *= std::exp(cplx{0.0, t * xi * xi});
        }
        out.levels.push_back(synthesize(sl));
    }
    return out;
}

EstimateReport certify(const std::string& inequality, const GridSpec& base_grid, int levels,
                       RefinementMode mode, const SuiteRunner& run, int jobs) {
    SuiteEnv base = make_env(base_grid, levels, jobs);
    base.max_band_exponent = base.windows.max_band_exponent();

    GridSpec fine_grid =
        mode == RefinementMode::space ? refine_space(base_grid) : refine_space_time(base_grid);
    SuiteEnv fine = make_env(fine_grid, levels, jobs);
    fine.max_band_exponent = base.max_band_exponent; // same functional on both grids

    std::vector<MemberResult> members = run(base);
    std::vector<MemberResult> refined = run(fine);

    EstimateReport report;
    report.inequality = inequality;
    report.members = members;
    {
        std::ostringstream os;
        os << "nx=" << base_grid.nx << " L=" << base_grid.length << " dt=" << base_grid.dt
           << " T=" << base_grid.horizon << " levels=" << levels
           << " refine=" << (mode == RefinementMode::space ? "space" : "space_time");
        report.config = os.str();
    }

    std::vector<double> ratios;
    for (const MemberResult& m : members)
        if (m.included) ratios.push_back(m.ratio());
    double fine_max = 0.0;
    for (const MemberResult& m : refined)
        if (m.included) fine_max = std::max(fine_max, m.ratio());

    if (ratios.empty()) {
        report.pass = false;
        return report;
    }
    std::sort(ratios.begin(), ratios.end());
    report.max_ratio = ratios.back();
    report.median_ratio = ratios.size() % 2 ? ratios[ratios.size() / 2]
                                            : 0.5 * (ratios[ratios.size() / 2 - 1] +
                                                     ratios[ratios.size() / 2]);
    report.trend.base_max = report.max_ratio;
    report.trend.refined_max = fine_max;
    report.trend.growth = fine_max / report.max_ratio - 1.0;
    report.pass = std::isfinite(report.max_ratio) && report.trend.growth < 0.05;
    return report;
}

// ---- free-flow space-time estimates ------------------------------------------

std::vector<MemberResult> verify_strichartz(const TestFamily& family, const SuiteEnv& env,
                                            double theta, double T) {
    if (theta < 0.0 || theta > 1.0) throw ConfigInvalid("strichartz: theta in [0,1]");
    if (!(T > 0.0 && T < 1.0)) throw ConfigInvalid("strichartz: needs T in (0,1)");
    const double q = theta == 0.0 ? kInfinity : 4.0 / theta;
    const double p = theta == 1.0 ? kInfinity : 2.0 / (1.0 - theta);
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        InitialData data = family.member_data(i);
        Field phi = data.realize(env.grid);
        SpacetimeField u = free_evolution(phi, T, env.levels);
        const double lhs = mixed_norm(u, MixedNormSpec::lt_lx(q, p));
        const double rhs = l2_norm(phi);
        out[static_cast<std::size_t>(i)] = make_result(
            i, "amp=" + fmt(data.amplitude) + ",width=" + fmt(data.width), lhs, rhs);
    });
    return out;
}

std::vector<MemberResult> verify_smoothing_maximal(const TestFamily& family, const SuiteEnv& env,
                                                   SmoothingKind which, double theta, double T) {
    if (!(T > 0.0 && T < 1.0)) throw ConfigInvalid("free-flow estimates: T in (0,1)");
    if (which == SmoothingKind::maximal_l2) theta = 0.0;
    std::vector<std::vector<MemberResult>> buckets(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Field phi = family.member_data(i).realize(env.grid);
        std::vector<MemberResult>& mine = buckets[static_cast<std::size_t>(i)];
        if (which == SmoothingKind::maximal_l4) {
            SpacetimeField u = free_evolution(phi, T, env.levels);
            const double lhs = mixed_norm(u, MixedNormSpec::lx_lt(4.0, kInfinity));
            const double rhs = sobolev_norm(phi, 0.25, true);
            mine.push_back(make_result(i, "member=" + std::to_string(i), lhs, rhs));
            return;
        }
        const double p = theta == 1.0 ? kInfinity : 2.0 / (1.0 - theta);
        const double q = theta == 0.0 ? kInfinity : 2.0 / theta;
        const double rhs_base = l2_norm(phi);
        for (const DyadicIndex& idx : env.dyadic_indices()) {
            Field block = project(phi, idx, env.windows);
            SpacetimeField u = free_evolution(block, T, env.levels);
            const double lhs = mixed_norm(u, MixedNormSpec::lx_lt(p, q));
            const double n = idx.value();
            const double weight = std::pow(1.0 + n * n, 0.5 * (0.5 - theta));
            mine.push_back(make_result(i, "member=" + std::to_string(i) + ",N=" + fmt(n), lhs,
                                       weight * rhs_base));
        }
    });
    std::vector<MemberResult> out;
    for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    for (std::size_t j = 0; j < out.size(); ++j) out[j].id = static_cast<int>(j);
    return out;
}

// ---- inhomogeneous (Duhamel) estimates ----------------------------------------

const char* duhamel_name(DuhamelEstimate which) {
    switch (which) {
        case DuhamelEstimate::dual_strichartz:      return "duhamel_dual_strichartz";
        case DuhamelEstimate::energy:               return "duhamel_energy";
        case DuhamelEstimate::band_maximal:         return "duhamel_band_maximal";
        case DuhamelEstimate::maximal_l4:           return "duhamel_maximal_l4";
        case DuhamelEstimate::smoothing:            return "duhamel_smoothing";
        case DuhamelEstimate::band_mixed:           return "duhamel_band_mixed";
        case DuhamelEstimate::maximal:              return "duhamel_maximal";
        case DuhamelEstimate::derivative_smoothing: return "duhamel_derivative_smoothing";
    }
    return "?";
}

bool duhamel_uses_theta(DuhamelEstimate which) {
    switch (which) {
        case DuhamelEstimate::smoothing:
        case DuhamelEstimate::maximal:
        case DuhamelEstimate::derivative_smoothing:
            return false;
        default:
            return true;
    }
}

namespace {

// Forcing member: f(tau, x) = exp(i omega tau) S(tau) phi_i.
SpacetimeField forcing_member(const TestFamily& family, const SuiteEnv& env, int i, double T) {
    Field phi = family.member_data(i).realize(env.grid);
    SpacetimeField f = free_evolution(phi, T, env.levels);
    Draw d(family.seed ^ 0xF0F0F0F0ULL, i);
    const double omega = d.in(-8.0, 8.0);
    for (int l = 0; l < f.steps(); ++l) {
        const cplx m = std::exp(cplx{0.0, omega * f.time(l)});
        for (int x = 0; x < f.grid.nx; ++x) f.slice(l)[x] *= m;
    }
    return f;
}

double lt1_sobolev(const SpacetimeField& f, double s, bool homogeneous) {
    // L_T^1 of a per-slice Sobolev norm (trapezoid).
    long double acc = 0.0L;
    for (int l = 0; l < f.steps(); ++l) {
        const double w = (l == 0 || l == f.steps() - 1) ? 0.5 : 1.0;
        acc += w * f.level_spacing * sobolev_norm(f.slice(l), s, homogeneous);
    }
    return static_cast<double>(acc);
}

} // namespace

std::vector<MemberResult> verify_inhomogeneous(const TestFamily& family, const SuiteEnv& env,
                                               DuhamelEstimate which, double theta, double T) {
    if (!(T > 0.0 && T < 1.0)) throw ConfigInvalid("duhamel estimates: T in (0,1)");
    if (!duhamel_uses_theta(which)) theta = 0.0;
    const double p_theta = 4.0 / (3.0 + theta);
    const double q_theta = 4.0 / (3.0 - theta);

    std::vector<std::vector<MemberResult>> buckets(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        SpacetimeField f = forcing_member(family, env, i, T);
        SpacetimeField duh = duhamel_integral(f);
        auto& mine = buckets[static_cast<std::size_t>(i)];
        const std::string tag = "member=" + std::to_string(i);
        switch (which) {
            case DuhamelEstimate::dual_strichartz: {
                const double q = theta == 0.0 ? kInfinity : 4.0 / theta;
                const double p = theta == 1.0 ? kInfinity : 2.0 / (1.0 - theta);
                const double lhs = mixed_norm(duh, MixedNormSpec::lt_lx(q, p));
                const double rhs =
                    mixed_norm(f, MixedNormSpec::lt_lx(prime_exponent(q), prime_exponent(p)));
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
            case DuhamelEstimate::energy: {
                const double lhs =
                    mixed_norm(apply_bessel(duh, 0.5 * theta), MixedNormSpec::lt_lx(kInfinity, 2.0));
                const double rhs = mixed_norm(f, MixedNormSpec::lx_lt(p_theta, q_theta));
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
            case DuhamelEstimate::band_maximal: {
                const double rhs = mixed_norm(f, MixedNormSpec::lx_lt(p_theta, q_theta));
                for (const DyadicIndex& idx : env.dyadic_indices()) {
                    SpacetimeField duh_n = duhamel_integral(project(f, idx, env.windows));
                    const double lhs = mixed_norm(apply_bessel(duh_n, 0.5 * theta),
                                                  MixedNormSpec::lx_lt(2.0, kInfinity));
                    const double n = idx.value();
                    mine.push_back(make_result(i, tag + ",N=" + fmt(n), lhs,
                                               std::pow(1.0 + n * n, 0.25) * rhs));
                }
                break;
            }
            case DuhamelEstimate::maximal_l4: {
                const double lhs = mixed_norm(apply_bessel(duh, 0.5 * theta - 0.25),
                                              MixedNormSpec::lx_lt(4.0, kInfinity));
                const double rhs = mixed_norm(f, MixedNormSpec::lx_lt(p_theta, q_theta));
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
            case DuhamelEstimate::smoothing: {
                const double lhs =
                    mixed_norm(apply_bessel(duh, 0.5), MixedNormSpec::lx_lt(kInfinity, 2.0));
                const double rhs = mixed_norm(f, MixedNormSpec::lt_lx(1.0, 2.0));
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
            case DuhamelEstimate::band_mixed: {
                const double p = theta == 0.0 ? kInfinity : 2.0 / theta;
                const double q = theta == 1.0 ? kInfinity : 2.0 / (1.0 - theta);
                const double rhs = mixed_norm(f, MixedNormSpec::lt_lx(1.0, 2.0));
                for (const DyadicIndex& idx : env.dyadic_indices()) {
                    SpacetimeField duh_n = duhamel_integral(project(f, idx, env.windows));
                    const double lhs = mixed_norm(duh_n, MixedNormSpec::lx_lt(p, q));
                    const double n = idx.value();
                    mine.push_back(make_result(i, tag + ",N=" + fmt(n), lhs,
                                               std::pow(1.0 + n * n, 0.5 * (0.5 - theta)) * rhs));
                }
                break;
            }
            case DuhamelEstimate::maximal: {
                const double lhs = mixed_norm(duh, MixedNormSpec::lx_lt(4.0, kInfinity));
                const double rhs = lt1_sobolev(f, 0.25, true);
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
            case DuhamelEstimate::derivative_smoothing: {
                const double lhs =
                    mixed_norm(apply_dx(duh), MixedNormSpec::lx_lt(kInfinity, 2.0));
                const double rhs = mixed_norm(f, MixedNormSpec::lx_lt(1.0, 2.0));
                mine.push_back(make_result(i, tag, lhs, rhs));
                break;
            }
        }
    });
    std::vector<MemberResult> out;
    for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    for (std::size_t j = 0; j < out.size(); ++j) out[j].id = static_cast<int>(j);
    return out;
}

// ---- fractional Leibniz rule for gauge factors ---------------------------------

void LeibnizExponents::validate() const {
    auto bad = [](double a, double b, double c) { return std::abs(1.0 / a - 1.0 / b - 1.0 / c) > 1e-12; };
    if (bad(p, p1, p2) || bad(q, q1, q2))
        throw ExponentMismatch("gauge Leibniz: need 1/p = 1/p1 + 1/p2 and 1/q = 1/q1 + 1/q2");
}

std::vector<MemberResult> verify_gauge_leibniz(const TestFamily& family, const SuiteEnv& env,
                                               double alpha, const LeibnizExponents& exps,
                                               double T) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigInvalid("gauge Leibniz: alpha in (0,1)");
    exps.validate();
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        // f real-valued, g complex; both freely evolved so the time axis is live.
        InitialData df = family.member_data(2 * i);
        InitialData dg = family.member_data(2 * i + 1);
        SpacetimeField fev = free_evolution(df.realize(env.grid), T, env.levels);
        SpacetimeField g = free_evolution(dg.realize(env.grid), T, env.levels);
        SpacetimeField prod;
        prod.grid = env.grid;
        prod.level_spacing = g.level_spacing;
        SpacetimeField freal = fev;
        for (int l = 0; l < g.steps(); ++l) {
            Field fr(env.grid);
            for (int x = 0; x < env.grid.nx; ++x) fr[x] = cplx{fev.slice(l)[x].real(), 0.0};
            freal.slice(l) = fr;
            Field big = primitive(fr, 1e-6);
            Field e(env.grid);
            for (int x = 0; x < env.grid.nx; ++x)
                e[x] = std::exp(cplx{0.0, big[x].real()}) * g.slice(l)[x];
            prod.levels.push_back(fractional_derivative(e, alpha, DerivativeKind::homogeneous));
        }
        const double lhs = mixed_norm(prod, MixedNormSpec::lx_lt(exps.p, exps.q));
        const double rhs1 = mixed_norm(freal, MixedNormSpec::lx_lt(exps.p1, exps.q1)) *
                            mixed_norm(g, MixedNormSpec::lx_lt(exps.p2, exps.q2));
        const double rhs2 = mixed_norm(apply_bessel(g, alpha), MixedNormSpec::lx_lt(exps.p, exps.q));
        out[static_cast<std::size_t>(i)] = make_result(i, "member=" + std::to_string(i), lhs,
                                                       rhs1 + rhs2);
    });
    return out;
}

// ---- bilinear estimate ----------------------------------------------------------

namespace {

Trajectory member_trajectory(const TestFamily& family, const SuiteEnv& env, int i) {
    Field u0 = family.member_data(i).realize(env.grid);
    return solve(u0, family.lambda, family.k, env.grid);
}

} // namespace

std::vector<MemberResult> verify_bilinear_multi(const TestFamily& family, const SuiteEnv& env,
                                                const std::vector<double>& ps) {
    for (double p : ps)
        if (p < 4.0) throw ConfigInvalid("bilinear: needs p >= 4");
    const int np = static_cast<int>(ps.size());
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality * np));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Trajectory traj = member_trajectory(family, env, i);
        const SpacetimeField& u = traj.data;
        const double T = u.duration();
        SpacetimeField prod;
        prod.grid = u.grid;
        prod.level_spacing = u.level_spacing;
        for (int l = 0; l < u.steps(); ++l) {
            Field ux = derivative(u.slice(l));
            Field v(u.grid);
            for (int x = 0; x < u.grid.nx; ++x) v[x] = u.slice(l)[x] * std::conj(ux[x]);
            prod.levels.push_back(std::move(v));
        }
        const double X = xt_norm(u, env.windows, env.xt_options()).total;
        const double Xh =
            xt_norm(project_region(u, DyadicRelation::much_greater, 1.0, env.windows), env.windows,
                    env.xt_options())
                .total;
        for (int j = 0; j < np; ++j) {
            const double p = ps[static_cast<std::size_t>(j)];
            const double lhs = mixed_norm(prod, MixedNormSpec::lx_lt(p, 2.0));
            const double r = std::sqrt(T) * X * X + (1.0 + std::pow(T, 0.25) * X) * X * Xh;
            out[static_cast<std::size_t>(i * np + j)] = make_result(
                i * np + j, "member=" + std::to_string(i) + ",p=" + fmt(p), lhs, r);
        }
    });
    return out;
}

std::vector<MemberResult> verify_bilinear(const TestFamily& family, const SuiteEnv& env, double p) {
    return verify_bilinear_multi(family, env, {p});
}

// ---- projector commutator identity ------------------------------------------------

CommutatorReport verify_commutator(const Field& f, const Field& g, const std::vector<double>& bands,
                                   const SuiteEnv& env, int x_samples, int eta_nodes) {
    const GridSpec& grid = f.grid;
    if (static_cast<std::int64_t>(x_samples) * eta_nodes * grid.nx > 64LL * 1024 * 1024)
        throw QuadratureBudgetExceeded("commutator: quadrature grid too large");

    CommutatorReport report;

    // Significant modes of f_x for off-grid trigonometric evaluation.
    Spectrum fx = analyze(derivative(f));
    struct Mode { double xi; cplx c; };
    std::vector<Mode> modes;
    double peak = 0.0;
    for (int j = 0; j < grid.nx; ++j) peak = std::max(peak, std::abs(fx[j]));
    for (int j = 0; j < grid.nx; ++j)
        if (std::abs(fx[j]) > 1e-14 * peak) modes.push_back({grid.xi(j), fx[j] / grid.length});
    auto fx_at = [&](double x) {
        cplx acc{0.0, 0.0};
        for (const Mode& m : modes) acc += m.c * std::exp(cplx{0.0, m.xi * x});
        return acc;
    };

    // Gauss-Legendre nodes on [0,1].
    std::vector<double> eta(static_cast<std::size_t>(eta_nodes)), wq(eta.size());
    for (int q = 0; q < eta_nodes; ++q) {
        // Newton on Legendre P_n
        double x = std::cos(M_PI * (q + 0.75) / (eta_nodes + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int n2 = 2; n2 <= eta_nodes; ++n2) {
                const double p2 = ((2.0 * n2 - 1.0) * x * p1 - (n2 - 1.0) * p0) / n2;
                p0 = p1;
                p1 = p2;
            }
            const double dp = eta_nodes * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int n2 = 2; n2 <= eta_nodes; ++n2) {
            const double p2 = ((2.0 * n2 - 1.0) * x * p1 - (n2 - 1.0) * p0) / n2;
            p0 = p1;
            p1 = p2;
        }
        const double dp = eta_nodes * (x * p1 - p0) / (x * x - 1.0);
        eta[static_cast<std::size_t>(q)] = 0.5 * (x + 1.0);
        wq[static_cast<std::size_t>(q)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }

    double spread_lo = kInfinity, spread_hi = 0.0;
    const double fx_l2 = l2_norm(derivative(f));

    for (double n : bands) {
        const DyadicIndex idx = DyadicIndex::band_value(n);
        // Direct side: P_N(fg) - f P_N g on the grid.
        Field fg(grid);
        for (int i = 0; i < grid.nx; ++i) fg[i] = f[i] * g[i];
        Field lhs = project(fg, idx, env.windows);
        Field png = project(g, idx, env.windows);
        for (int i = 0; i < grid.nx; ++i) lhs[i] -= f[i] * png[i];

        // Kernel side at sampled x: the calculus identity carries a minus
        // sign (f(x-y) - f(x) = -y int_0^1 f_x(x - eta y) d eta).
        Spectrum ker_spec(grid);
        for (int j = 0; j < grid.nx; ++j) ker_spec[j] = env.windows.window(idx, grid.xi(j));
        ker_spec[grid.nyquist_index()] = cplx{0.0, 0.0};
        Field ker = synthesize(ker_spec);

        double max_err = 0.0, scale = 0.0;
        for (int i = 0; i < grid.nx; ++i) scale = std::max(scale, std::abs(fg[i]));
        const int stride = grid.nx / x_samples;
        for (int si = 0; si < x_samples; ++si) {
            const int i = si * stride;
            const double x = grid.x(i);
            cplx quad{0.0, 0.0};
            for (int yj = 0; yj < grid.nx; ++yj) {
                const double y = grid.x(yj);
                // field index of x_i - y_j: the grid starts at -L/2, so the
                // difference point sits at index i - yj + nx/2 (mod nx)
                const int shifted = ((i - yj + grid.nx / 2) % grid.nx + grid.nx) % grid.nx;
                const cplx kyg = ker[yj] * y * g[shifted];
                if (std::abs(kyg) < 1e-18) continue;
                cplx inner{0.0, 0.0};
                for (int q = 0; q < eta_nodes; ++q)
                    inner += wq[static_cast<std::size_t>(q)] *
                             fx_at(x - eta[static_cast<std::size_t>(q)] * y);
                quad += kyg * inner;
            }
            quad *= -grid.dx();
            max_err = std::max(max_err, std::abs(lhs[i] - quad));
        }
        report.identity_error = std::max(report.identity_error, max_err / std::max(scale, 1e-300));

        // Bound check with the proof's band-localized pairing: g appears as
        // a tilde-block on both sides, so the ratio isolates the kernel's
        // ||phi_check_N(y) y||_1 ~ 1/N factor.
        Field gn = tilde_project(g, n, env.windows, TildeWidth::one);
        Field fgn(grid);
        for (int i = 0; i < grid.nx; ++i) fgn[i] = f[i] * gn[i];
        Field comm = project(fgn, idx, env.windows);
        Field pgn = project(gn, idx, env.windows);
        for (int i = 0; i < grid.nx; ++i) comm[i] -= f[i] * pgn[i];
        const double gn_l2 = l2_norm(gn);
        if (gn_l2 < 1e-14)
            throw ZeroRhs("verify_commutator: g has no content near band N");
        const double ratio = lp_norm(comm, 1.0) / (fx_l2 * gn_l2);
        report.bound_ratio[n] = ratio;
        spread_lo = std::min(spread_lo, ratio * n);
        spread_hi = std::max(spread_hi, ratio * n);
    }
    report.scaling_spread = spread_hi / spread_lo;
    return report;
}

// ---- gauged nonlinear forcings ------------------------------------------------------

namespace {

struct XtPair {
    double x = 0.0;
    double xh = 0.0;
    double sup_h = 0.0; // L_T^inf H^{1/2}
};

XtPair xt_pair(const SpacetimeField& u, const SuiteEnv& env) {
    XtPair out;
    XtNormBreakdown full = xt_norm(u, env.windows, env.xt_options());
    out.x = full.total;
    out.sup_h = full.sup_sobolev;
    out.xh = xt_norm(project_region(u, DyadicRelation::much_greater, 1.0, env.windows),
                     env.windows, env.xt_options())
                 .total;
    return out;
}

double forcing_rhs_full(double T, double k, double X, double Xh) {
    const double kt = k_tilde(k);
    const double rT4 = std::pow(T, 0.25);
    const double sT = std::sqrt(T);
    double rhs = (1.0 + std::pow(X, k)) *
                 (sT * std::pow(X, kt + 1.0) * std::pow(Xh, k - kt) +
                  (1.0 + rT4 * X) * std::pow(X, kt) * std::pow(Xh, k + 1.0 - kt));
    rhs += sT * (std::pow(X, 2.0 * k - 1.0) + std::pow(X, (5.0 * k - 2.0) / 2.0)) * Xh;
    rhs += rT4 * std::sqrt(1.0 + rT4 * X) * std::pow(X, 2.0 * k - 1.0) * std::pow(Xh, 1.5);
    rhs += (1.0 + std::pow(X, k)) *
           (sT * std::pow(X, k) * Xh + std::pow(1.0 + rT4 * X, 2.0) * std::pow(X, k - 1.0) * Xh * Xh);
    rhs += sT * std::pow(X, 3.0 * k) * Xh;
    return rhs;
}

double term_rhs(int j, double T, double k, double X, double Xh) {
    const double kt = k_tilde(k);
    const double rT4 = std::pow(T, 0.25);
    const double sT = std::sqrt(T);
    switch (j) {
        case 1:
            return (1.0 + std::pow(X, k)) *
                   (sT * std::pow(X, kt + 1.0) * std::pow(Xh, k - kt) +
                    (1.0 + rT4 * X) * std::pow(X, kt) * std::pow(Xh, k + 1.0 - kt));
        case 2:
            return (1.0 + std::pow(X, k)) *
                   (sT * std::pow(X, k) * Xh +
                    std::pow(1.0 + rT4 * X, 2.0) * std::pow(X, k - 2.0) * Xh * Xh * Xh);
        case 3:
            return sT * (std::pow(X, 2.0 * k - 1.0) + std::pow(X, (5.0 * k - 2.0) / 2.0)) * Xh +
                   rT4 * std::sqrt(1.0 + rT4 * X) * std::pow(X, 2.0 * k - 1.0) * std::pow(Xh, 1.5);
        case 4:
            return (1.0 + std::pow(X, k)) *
                   (sT * std::pow(X, k) * Xh + (1.0 + rT4 * X) * std::pow(X, k - 1.0) * Xh * Xh);
        case 5:
            return sT * std::pow(X, 3.0 * k) * Xh;
    }
    throw std::invalid_argument("term_rhs: j in 1..5");
}

} // namespace

std::vector<MemberResult> verify_nonlinear(const TestFamily& family, const SuiteEnv& env,
                                           const std::set<int>& terms, GaugeTermOptions opts) {
    if (terms.empty()) throw std::invalid_argument("verify_nonlinear: empty term selection");
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Trajectory traj = member_trajectory(family, env, i);
        if (traj.data.steps() < 65)
            throw TooFewTimeLevels("verify_nonlinear: need >= 65 stored levels");
        const SpacetimeField& u = traj.data;
        const double T = u.duration();
        long double acc = 0.0L;
        for (const DyadicIndex& band : env.high_bands()) {
            GaugeParams p{family.lambda, family.k, band};
            GaugeTermSet set = gauge_terms(u, p, env.windows, opts);
            SpacetimeField forcing = set.term(*terms.begin());
            bool first = true;
            for (int j : terms) {
                if (first) { first = false; continue; }
                const SpacetimeField& t = set.term(j);
                for (int l = 0; l < forcing.steps(); ++l)
                    for (int x = 0; x < forcing.grid.nx; ++x) forcing.slice(l)[x] += t.slice(l)[x];
            }
            const double y = yt_norm(duhamel_integral(forcing));
            acc += static_cast<long double>(y) * y;
        }
        const double lhs = std::sqrt(static_cast<double>(acc));
        XtPair xp = xt_pair(u, env);
        double rhs;
        if (terms.size() == 5) {
            rhs = forcing_rhs_full(T, family.k, xp.x, xp.xh);
        } else {
            rhs = 0.0;
            for (int j : terms) rhs += term_rhs(j, T, family.k, xp.x, xp.xh);
        }
        out[static_cast<std::size_t>(i)] = make_result(i, "member=" + std::to_string(i), lhs, rhs);
    });
    return out;
}

std::vector<MemberResult> verify_band_commutator(const TestFamily& family, const SuiteEnv& env) {
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Trajectory traj = member_trajectory(family, env, i);
        const SpacetimeField& u = traj.data;
        const double T = u.duration();
        const double k = family.k;
        long double acc = 0.0L;
        for (const DyadicIndex& band : env.high_bands()) {
            const double n = band.value();
            SpacetimeField comm;
            comm.grid = u.grid;
            comm.level_spacing = u.level_spacing;
            for (int l = 0; l < u.steps(); ++l) {
                Field w = project_region(u.slice(l), DyadicRelation::much_less, n, env.windows);
                Field wk = pointwise_power_modulus(w, k);
                Field gN = tilde_project(derivative(u.slice(l)), n, env.windows, TildeWidth::one);
                Field prod(u.grid);
                for (int x = 0; x < u.grid.nx; ++x) prod[x] = wk[x].real() * gN[x];
                Field lhs_f = project(prod, band, env.windows);
                Field pg = project(gN, band, env.windows);
                for (int x = 0; x < u.grid.nx; ++x) lhs_f[x] -= wk[x].real() * pg[x];
                comm.levels.push_back(std::move(lhs_f));
            }
            const double c = mixed_norm(comm, MixedNormSpec::lx_lt(1.0, 2.0));
            acc += static_cast<long double>(c) * c;
        }
        const double lhs = std::sqrt(static_cast<double>(acc));
        XtPair xp = xt_pair(u, env);
        const double rhs = std::sqrt(T) * std::pow(xp.x, k) * xp.xh +
                           (1.0 + std::pow(T, 0.25) * xp.x) * std::pow(xp.x, k - 1.0) * xp.xh * xp.xh;
        out[static_cast<std::size_t>(i)] = make_result(i, "member=" + std::to_string(i), lhs, rhs);
    });
    return out;
}

std::vector<MemberResult> verify_power_difference(const TestFamily& family, const SuiteEnv& env) {
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Trajectory traj = member_trajectory(family, env, i);
        const SpacetimeField& u = traj.data;
        const double T = u.duration();
        const double k = family.k;
        const double kt = k_tilde(k);
        long double acc = 0.0L;
        for (const DyadicIndex& band : env.high_bands()) {
            const double n = band.value();
            SpacetimeField diff;
            diff.grid = u.grid;
            diff.level_spacing = u.level_spacing;
            for (int l = 0; l < u.steps(); ++l) {
                Field ux = derivative(u.slice(l));
                Field w = project_region(u.slice(l), DyadicRelation::much_less, n, env.windows);
                Field prod(u.grid);
                for (int x = 0; x < u.grid.nx; ++x) {
                    const double uu = std::abs(u.slice(l)[x]);
                    const double ww = std::abs(w[x]);
                    const double du = (uu < 1e-300 ? 0.0 : std::exp(k * std::log(uu))) -
                                      (ww < 1e-300 ? 0.0 : std::exp(k * std::log(ww)));
                    prod[x] = du * ux[x];
                }
                diff.levels.push_back(project(prod, band, env.windows));
            }
            const double c = mixed_norm(diff, MixedNormSpec::lx_lt(1.0, 2.0));
            acc += static_cast<long double>(c) * c;
        }
        const double lhs = std::sqrt(static_cast<double>(acc));
        XtPair xp = xt_pair(u, env);
        const double rhs =
            std::sqrt(T) * std::pow(xp.x, kt + 1.0) * std::pow(xp.xh, k - kt) +
            (1.0 + std::pow(T, 0.25) * xp.x) * std::pow(xp.x, kt) * std::pow(xp.xh, k + 1.0 - kt);
        out[static_cast<std::size_t>(i)] = make_result(i, "member=" + std::to_string(i), lhs, rhs);
    });
    return out;
}

// ---- gauged data estimate -----------------------------------------------------------

std::vector<MemberResult> verify_data_gauge(const TestFamily& family, const SuiteEnv& env,
                                            double T, double lambda, double k) {
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Field u0 = family.member_data(i).realize(env.grid);
        long double acc = 0.0L;
        for (const DyadicIndex& band : env.high_bands()) {
            GaugeParams p{lambda, k, band};
            Field phase = gauge_phase(u0, p, env.windows);
            Field pn = project(u0, band, env.windows);
            Field data(u0.grid);
            for (int x = 0; x < u0.grid.nx; ++x) data[x] = phase[x] * pn[x];
            const double y = yt_norm(free_evolution(data, T, env.levels));
            acc += static_cast<long double>(y) * y;
        }
        const double lhs = std::sqrt(static_cast<double>(acc));
        const double h_half = sobolev_norm(u0, 0.5);
        const double high =
            sobolev_norm(project_region(u0, DyadicRelation::much_greater, 1.0, env.windows), 0.5);
        const double rhs = (1.0 + std::pow(h_half, k)) * high;
        out[static_cast<std::size_t>(i)] = make_result(i, "member=" + std::to_string(i), lhs, rhs);
    });
    return out;
}

// ---- small-data a priori bound --------------------------------------------------------

AprioriReport verify_apriori(const Trajectory& traj, double c_low, double c_high,
                             const SuiteEnv& env) {
    const SpacetimeField& u = traj.data;
    const double T = u.duration();
    const double k = traj.k;
    if (T > std::pow(c_high, 4.0) * (1.0 + 1e-9))
        throw HypothesisViolated("apriori: needs T <= C_high^4");
    FrequencySplit split = frequency_split_norms(u.slice(0), c_low, c_high, env.windows);
    if (split.tilde > 2.0 + 1e-9)
        throw HypothesisViolated("apriori: rescaled data must have tilde norm <= 2, got " +
                                 fmt(split.tilde));

    AprioriReport rep;
    const double X = xt_norm(u, env.windows, env.xt_options()).total;
    const double Xlow =
        xt_norm(project_region(u, DyadicRelation::lesssim, 1.0, env.windows), env.windows,
                env.xt_options())
            .total;
    const double Xh =
        xt_norm(project_region(u, DyadicRelation::much_greater, 1.0, env.windows), env.windows,
                env.xt_options())
            .total;
    double sup_h = 0.0;
    for (int l = 0; l < u.steps(); ++l) sup_h = std::max(sup_h, sobolev_norm(u.slice(l), 0.5));

    rep.low_band_ratio = Xlow / (c_low + std::sqrt(T) * std::pow(X, k + 1.0));

    long double acc = 0.0L;
    for (const DyadicIndex& band : env.high_bands()) {
        GaugeParams p{traj.lambda, k, band};
        const double y = yt_norm(gauge_transform(u, p, env.windows));
        acc += static_cast<long double>(y) * y;
    }
    const double vsum = std::sqrt(static_cast<double>(acc));
    rep.high_band_ratio = Xh / ((1.0 + std::pow(sup_h, 2.0 * k)) * std::max(vsum, kRhsError));

    long double dacc = 0.0L;
    for (const DyadicIndex& band : env.high_bands()) {
        GaugeParams p{traj.lambda, k, band};
        Field phase = gauge_phase(u.slice(0), p, env.windows);
        Field pn = project(u.slice(0), band, env.windows);
        Field data(u.grid);
        for (int x = 0; x < u.grid.nx; ++x) data[x] = phase[x] * pn[x];
        const double y = yt_norm(free_evolution(data, T, env.levels));
        dacc += static_cast<long double>(y) * y;
    }
    const double data_lhs = std::sqrt(static_cast<double>(dacc));
    const double high0 =
        sobolev_norm(project_region(u.slice(0), DyadicRelation::much_greater, 1.0, env.windows), 0.5);
    rep.data_ratio =
        data_lhs / std::max((1.0 + std::pow(sobolev_norm(u.slice(0), 0.5), k)) * high0, kRhsError);

    const double tx = Xlow / c_low + Xh / c_high;
    // Non-constructive C(a) realized as 1 + a; recorded, gate is stability.
    const double rhs64 = (1.0 + c_low) +
                         std::pow(1.0 + c_low + tx, 3.0 * k) * (std::pow(T, 0.25) + c_high) * tx;
    rep.bootstrap_ratio = tx / rhs64;
    rep.smallness_constant = tx / (c_low + c_high);
    return rep;
}

std::vector<MemberResult> verify_apriori_family(const TestFamily& family, const SuiteEnv& env,
                                                double c_high_target) {
    std::vector<MemberResult> out(static_cast<std::size_t>(family.cardinality));
    parallel_members(family.cardinality, env.jobs, [&](int i) {
        Field u0 = family.member_data(i).realize(env.grid);
        ScalingChoice sc = choose_scaling(u0, family.k, c_high_target);
        Field scaled = scale(u0, sc.gamma, family.k);
        GridSpec run = scaled.grid;
        run.dt = env.grid.dt;
        run.horizon = env.grid.horizon;
        Trajectory traj = solve(scaled, family.lambda, family.k, run);
        SuiteEnv scaled_env = make_env(run, env.levels, 1);
        scaled_env.max_band_exponent =
            std::min(env.max_band_exponent < 0 ? scaled_env.windows.max_band_exponent()
                                               : env.max_band_exponent,
                     scaled_env.windows.max_band_exponent());
        AprioriReport rep = verify_apriori(traj, sc.c_low, sc.c_high, scaled_env);
        // Reported inequality: ||u||_X-tilde <= C (C_low + C_high).
        out[static_cast<std::size_t>(i)] =
            make_result(i, "member=" + std::to_string(i) + ",gamma=" + fmt(sc.gamma),
                        rep.smallness_constant, 1.0);
    });
    return out;
}

} // namespace dnls
