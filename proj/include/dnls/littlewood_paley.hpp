#ifndef DNLS_LITTLEWOOD_PALEY_HPP
#define DNLS_LITTLEWOOD_PALEY_HPP

#include <vector>

#include "dnls/grid.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

// Frequency-block label: the low block P_0 or the dyadic band N = 2^j.
struct DyadicIndex {
    enum class Tag { low, band } tag = Tag::low;
    int j = 0; // band exponent, meaningful for tag == band

    static DyadicIndex low() { return DyadicIndex{Tag::low, 0}; }
    static DyadicIndex band(int j) { return DyadicIndex{Tag::band, j}; }
    static DyadicIndex band_value(double n);

    bool is_low() const { return tag == Tag::low; }
    double value() const { return is_low() ? 0.0 : std::ldexp(1.0, j); }

    bool operator==(const DyadicIndex&) const = default;
};

enum class DyadicRelation { much_less, lesssim, sim, gtrsim, much_greater };

// Comparability conventions used everywhere:
//   M << N  :  M <= N/4        M >> N  :  M >= 4N
//   M <~ N  :  M <= 2N         M >~ N  :  M >= N/2
//   M ~  N  :  N/2 <= M <= 2N
// so (<<, >~) and (<~, >>) are exact complements and ~ agrees with the
// width-one tilde projector P_{N/2} + P_N + P_{2N}.

enum class TildeWidth { one, two }; // sum over 2^{+-1} N or 2^{+-2} N

struct WindowProfile {
    // Reserved for alternative transition shapes; the default is the
    // C-infinity bump-quotient profile.
    int unused = 0;
};

// Smooth dyadic windows sampled on a grid's frequencies.
// psi(xi) = 1 for |xi| <= 1, supp psi in {|xi| < 2}; phi = psi - psi(2 xi).
// The top usable band absorbs everything above it so the sampled family is
// an exact partition of unity on the whole grid (Nyquist mode excluded).
class WindowFamily {
public:
    static WindowFamily build(const GridSpec& grid, WindowProfile profile = {});

    const GridSpec& grid() const { return grid_; }
    double nyquist_cap() const { return cap_; }
    int max_band_exponent() const { return max_j_; }

    // All usable indices: low block then bands j = 0 .. max_band_exponent.
    std::vector<DyadicIndex> indices() const;
    // Bands with N >> 1 under the module convention (N >= 4).
    std::vector<DyadicIndex> high_indices() const;

    bool usable(const DyadicIndex& idx) const;

    // Sampled window value for a block at frequency xi.
    double window(const DyadicIndex& idx, double xi) const;
    // Indicator-sum window for a comparability region.
    double region_window(DyadicRelation rel, double n, double xi) const;
    double tilde_window(double n, double xi, TildeWidth width) const;

    // Smooth reference profile (exposed for tests).
    static double psi(double xi);
    static double phi(double xi) { return psi(xi) - psi(2.0 * xi); }

private:
    GridSpec grid_;
    double cap_ = 0.0;
    int max_j_ = -1;
};

// Frequency projections. All are multiplier operators, commute with every
// other multiplier, and zero the Nyquist mode.
Field project(const Field& f, const DyadicIndex& idx, const WindowFamily& w);
Field project_region(const Field& f, DyadicRelation rel, double n, const WindowFamily& w);
Field tilde_project(const Field& f, double n, const WindowFamily& w,
                    TildeWidth width = TildeWidth::two);

SpacetimeField project(const SpacetimeField& u, const DyadicIndex& idx, const WindowFamily& w);
SpacetimeField project_region(const SpacetimeField& u, DyadicRelation rel, double n,
                              const WindowFamily& w);

// ||D_x^s P_N f||_p / (N^s ||P_N f||_p); the low block uses weight 1.
double bernstein_ratio(const Field& f, const DyadicIndex& idx, double s, double p,
                       const WindowFamily& w);

} // namespace dnls

#endif
