#ifndef DNLS_ESTIMATES_HPP
#define DNLS_ESTIMATES_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnls/gauge.hpp"
#include "dnls/norms.hpp"
#include "dnls/solver.hpp"

namespace dnls {

// A declared family of test objects. Member parameters are drawn from the
// seed alone (never from the grid), so a refined grid sees the same
// continuum members.
struct TestFamily {
    enum class Kind { gaussian_sweep, modulated_sweep, random_band, solver_trajectory };
    Kind kind = Kind::gaussian_sweep;
    int cardinality = 20;
    std::uint64_t seed = 1;

    double amp_lo = 0.3, amp_hi = 1.2;
    double width_lo = 1.5, width_hi = 5.0;
    double mod_lo = 0.5, mod_hi = 3.0;
    int band_lo = 1, band_hi = 8;

    // physics for solver_trajectory members
    double lambda = 1.0;
    double k = 5.0;

    InitialData member_data(int index) const;
    std::string describe() const;
};

struct MemberResult {
    int id = 0;
    std::string params;
    double lhs = 0.0;
    double rhs = 0.0;
    bool included = true; // false when both sides vanish (asserted small)

    double ratio() const { return lhs / rhs; }
};

struct RefinementTrend {
    double base_max = 0.0;
    double refined_max = 0.0;
    double growth = 0.0; // refined/base - 1
};

struct EstimateReport {
    std::string inequality;
    std::string config; // resolved run parameters, human-readable
    std::vector<MemberResult> members;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    RefinementTrend trend;
    bool pass = false;
};

// Environment one suite evaluation runs in. `levels` is the stored-level
// count for free evolutions; solver suites take stride from the grid.
struct SuiteEnv {
    GridSpec grid;
    WindowFamily windows;
    int levels = 65;
    int max_band_exponent = -1; // freeze dyadic sums to this cap (-1: all)
    int jobs = 1;

    XtNormOptions xt_options() const;
    std::vector<DyadicIndex> dyadic_indices() const;
    std::vector<DyadicIndex> high_bands() const;
};

SuiteEnv make_env(const GridSpec& grid, int levels = 65, int jobs = 1);

using SuiteRunner = std::function<std::vector<MemberResult>(const SuiteEnv&)>;

enum class RefinementMode { space, space_time };

// Run a suite at the base grid and once refined; gate on < 5% growth of the
// max ratio. The refined environment keeps the base band cap so both runs
// measure the same functional.
EstimateReport certify(const std::string& inequality, const GridSpec& base_grid, int levels,
                       RefinementMode mode, const SuiteRunner& run, int jobs = 1);

// ---- free-flow space-time estimates ----------------------------------------

// || S(t) phi ||_{L_T^{4/theta} L_x^{2/(1-theta)}} <~ || phi ||_{L2}
std::vector<MemberResult> verify_strichartz(const TestFamily& family, const SuiteEnv& env,
                                            double theta, double T);

enum class SmoothingKind { smoothing, maximal_l2, maximal_l4 };

// Per-band local smoothing (maximal_l2 is its theta = 0 case) and the
// L_x^4 L_T^inf maximal bound against Hdot^{1/4}.
std::vector<MemberResult> verify_smoothing_maximal(const TestFamily& family, const SuiteEnv& env,
                                                   SmoothingKind which, double theta, double T);

// ---- inhomogeneous (Duhamel) estimates --------------------------------------

// The eight estimates for f -> int_0^t S(t-tau) f(tau) dtau, named by the
// norm pairing they control.
enum class DuhamelEstimate {
    dual_strichartz,      // L_T^{4/th} L_x^{2/(1-th)}  <-  dual exponents
    energy,               // <D>^{th/2} into L_T^inf L_x^2
    band_maximal,         // <D>^{th/2} P_N into L_x^2 L_T^inf
    maximal_l4,           // <D>^{th/2-1/4} into L_x^4 L_T^inf
    smoothing,            // <D>^{1/2} into L_x^inf L_T^2  <-  L_T^1 L_x^2
    band_mixed,           // P_N into L_x^{2/th} L_T^{2/(1-th)}
    maximal,              // L_x^4 L_T^inf  <-  L_T^1 Hdot^{1/4}
    derivative_smoothing, // d_x into L_x^inf L_T^2  <-  L_x^1 L_T^2
};

const char* duhamel_name(DuhamelEstimate which);
bool duhamel_uses_theta(DuhamelEstimate which);

std::vector<MemberResult> verify_inhomogeneous(const TestFamily& family, const SuiteEnv& env,
                                               DuhamelEstimate which, double theta, double T);

// ---- fractional Leibniz rule for gauge factors -------------------------------

struct LeibnizExponents {
    double p = 4, q = 2, p1 = 8, q1 = 4, p2 = 8, q2 = 4;
    void validate() const; // Hoelder relations
};

std::vector<MemberResult> verify_gauge_leibniz(const TestFamily& family, const SuiteEnv& env,
                                               double alpha, const LeibnizExponents& exps,
                                               double T);

// ---- bilinear estimate -------------------------------------------------------

std::vector<MemberResult> verify_bilinear(const TestFamily& family, const SuiteEnv& env, double p);

// One trajectory sweep serving several Lebesgue exponents; members are
// interleaved (member i, exponent j -> id i * |ps| + j).
std::vector<MemberResult> verify_bilinear_multi(const TestFamily& family, const SuiteEnv& env,
                                                const std::vector<double>& ps);

// ---- projector commutator identity --------------------------------------------

struct CommutatorReport {
    double identity_error = 0.0;             // max-abs quadrature vs. direct
    std::map<double, double> bound_ratio;    // N -> ||P_N(fg)-f P_N g||_1 / (||f_x|| ||g||)
    double scaling_spread = 0.0;             // max/min of N * bound_ratio
};

CommutatorReport verify_commutator(const Field& f, const Field& g, const std::vector<double>& bands,
                                   const SuiteEnv& env, int x_samples = 16, int eta_nodes = 24);

// ---- gauged nonlinear forcings -------------------------------------------------

std::vector<MemberResult> verify_nonlinear(const TestFamily& family, const SuiteEnv& env,
                                           const std::set<int>& terms, GaugeTermOptions opts = {});
// Commutator piece P_N(|w|^k g) - |w|^k P_N g summed over high bands.
std::vector<MemberResult> verify_band_commutator(const TestFamily& family, const SuiteEnv& env);
// Power-difference piece P_N((|u|^k - |w|^k) u_x) summed over high bands.
std::vector<MemberResult> verify_power_difference(const TestFamily& family, const SuiteEnv& env);

// ---- gauged data estimate ------------------------------------------------------

std::vector<MemberResult> verify_data_gauge(const TestFamily& family, const SuiteEnv& env,
                                            double T, double lambda = 1.0, double k = 5.0);

// ---- small-data a priori bound ---------------------------------------------------

struct AprioriReport {
    double low_band_ratio = 0.0;   // ||P_{<~1} u||_X vs C_low + T^{1/2} X^{k+1}
    double high_band_ratio = 0.0;  // ||P_{>>1} u||_X vs the gauged-block sum
    double data_ratio = 0.0;       // free flow of gauged data blocks
    double bootstrap_ratio = 0.0;  // the closed a priori inequality
    double smallness_constant = 0.0; // ||u||_X-tilde / (C_low + C_high)
};

AprioriReport verify_apriori(const Trajectory& traj, double c_low, double c_high,
                             const SuiteEnv& env);

std::vector<MemberResult> verify_apriori_family(const TestFamily& family, const SuiteEnv& env,
                                                double c_high_target);

// Largest integer strictly below k (k-1 when k is itself an integer).
double k_tilde(double k);

// S(t) phi sampled on `levels` uniformly spaced times covering [0, T].
SpacetimeField free_evolution(const Field& phi, double T, int levels);

} // namespace dnls

#endif
