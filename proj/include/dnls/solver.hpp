#ifndef DNLS_SOLVER_HPP
#define DNLS_SOLVER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dnls/grid.hpp"
#include "dnls/littlewood_paley.hpp"

namespace dnls {

// Cauchy data generators. Every realized field must decay below edge_tol at
// the domain seam so the periodic surrogate of the real line stays honest.
struct InitialData {
    enum class Kind { gaussian, modulated_gaussian, random_band, file };
    Kind kind = Kind::gaussian;
    double amplitude = 0.5;
    double width = 2.0;
    double center = 0.0;
    double modulation = 0.0;   // carrier frequency for modulated_gaussian
    int band_lo = 1;           // integer mode range for random_band
    int band_hi = 8;
    std::uint64_t seed = 1;
    std::string path;          // for Kind::file (binary dump of one field)

    Field realize(const GridSpec& grid, double edge_tol = 1e-8) const;
};

// Solver output: stored snapshots plus the physics and scheme parameters
// that produced them.
struct Trajectory {
    SpacetimeField data;
    double lambda = 0.0;
    double k = 5.0;
    double dt = 0.0;
    int store_every = 1;
    double dealias_fraction = 2.0 / 3.0;

    const GridSpec& grid() const { return data.grid; }
};

// Largest snapshot stride that divides `steps` and keeps at least
// min_levels stored levels (counting t = 0).
int choose_store_every(std::int64_t steps, int min_levels = 65);

// Integrating-factor RK4 for i u_t - u_xx + i lambda |u|^k u_x = 0.
// The linear flow is exact; the nonlinear term is dealiased each stage.
// store_every = 0 picks a stride via choose_store_every.
Trajectory solve(const Field& u0, double lambda, double k, const GridSpec& grid,
                 int store_every = 0);

// ||f||_{L^2}^2 by quadrature.
double mass(const Field& f);

// u0 -> gamma^{-1/k} u0(x/gamma) realized on the stretched grid of length
// gamma * L (same nx: the scaled data is strictly smoother).
Field scale(const Field& u0, double gamma, double k);

struct FrequencySplit {
    double low = 0.0;   // ||P_{<~1} u0||_{L2} / C_low
    double high = 0.0;  // ||P_{>>1} u0||_{H^{1/2}} / C_high
    double tilde = 0.0; // sum of the two
};

FrequencySplit frequency_split_norms(const Field& u0, double c_low, double c_high,
                                     const WindowFamily& w);

// Search over gamma in {1,2,4,...} for the smallest dyadic scaling that
// brings the high-frequency H^{1/2} mass under c_high_target. Returns
// (gamma, C_low, C_high) with C_low, C_high per the rescaling bookkeeping.
struct ScalingChoice {
    double gamma = 1.0;
    double c_low = 0.0;
    double c_high = 0.0;
};
ScalingChoice choose_scaling(const Field& u0, double k, double c_high_target,
                             double gamma_max = 64.0);

// Snapshot export: CSV rows (t, x, re, im) and a little-endian binary dump.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_trajectory_binary(const Trajectory& traj, std::ostream& os);
Trajectory read_trajectory_binary(std::istream& is);

} // namespace dnls

#endif
