#include "dnls/littlewood_paley.hpp"

#include <cmath>
#include <string>

namespace dnls {

namespace {

// C-infinity cutoff building block: chi(t) = exp(-1/t) for t > 0, else 0.
double chi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

} // namespace

DyadicIndex DyadicIndex::band_value(double n) {
    if (n <= 0.0) return low();
    const double j = std::log2(n);
    const int ji = static_cast<int>(std::lround(j));
    if (ji < 0 || std::abs(j - ji) > 1e-9)
        throw std::invalid_argument("band_value: N must be a dyadic 2^j, j >= 0");
    return band(ji);
}

double WindowFamily::psi(double xi) {
    const double a = chi(2.0 - std::abs(xi));
    const double b = chi(std::abs(xi) - 1.0);
    if (a == 0.0) return 0.0;
    return a / (a + b);
}

WindowFamily WindowFamily::build(const GridSpec& grid, WindowProfile) {
    WindowFamily w;
    w.grid_ = grid;
    const double half_nyquist = 0.5 * grid.xi_max();
    const int max_j = static_cast<int>(std::floor(std::log2(half_nyquist) + 1e-12));
    if (max_j < 1)
        throw ResolutionTooCoarse("window family needs at least two usable dyadic bands; "
                                  "half Nyquist is " + std::to_string(half_nyquist));
    w.max_j_ = max_j;
    w.cap_ = std::ldexp(1.0, max_j);
    return w;
}

std::vector<DyadicIndex> WindowFamily::indices() const {
    std::vector<DyadicIndex> out;
    out.push_back(DyadicIndex::low());
    for (int j = 0; j <= max_j_; ++j) out.push_back(DyadicIndex::band(j));
    return out;
}

std::vector<DyadicIndex> WindowFamily::high_indices() const {
    std::vector<DyadicIndex> out;
    for (int j = 2; j <= max_j_; ++j) out.push_back(DyadicIndex::band(j));
    return out;
}

bool WindowFamily::usable(const DyadicIndex& idx) const {
    return idx.is_low() || idx.j <= max_j_;
}

double WindowFamily::window(const DyadicIndex& idx, double xi) const {
    if (!usable(idx))
        throw BandAboveNyquist("band 2^" + std::to_string(idx.j) + " exceeds the usable cap " +
                               std::to_string(cap_));
    if (idx.is_low()) return psi(2.0 * xi);
    const double n = idx.value();
    if (idx.j == max_j_) return 1.0 - psi(2.0 * xi / n); // top band absorbs the tail
    return phi(xi / n);
}

double WindowFamily::region_window(DyadicRelation rel, double n, double xi) const {
    const DyadicIndex ref = DyadicIndex::band_value(n);
    if (!usable(ref))
        throw BandAboveNyquist("region reference band above the usable cap");
    double acc = 0.0;
    for (const DyadicIndex& idx : indices()) {
        const double m = idx.value();
        bool in = false;
        switch (rel) {
            case DyadicRelation::much_less:     in = m <= n / 4.0; break;
            case DyadicRelation::lesssim:       in = m <= 2.0 * n; break;
            case DyadicRelation::sim:           in = m >= n / 2.0 && m <= 2.0 * n; break;
            case DyadicRelation::gtrsim:        in = m >= n / 2.0; break;
            case DyadicRelation::much_greater:  in = m >= 4.0 * n; break;
        }
        if (in) acc += window(idx, xi);
    }
    return acc;
}

double WindowFamily::tilde_window(double n, double xi, TildeWidth width) const {
    const int span = width == TildeWidth::one ? 1 : 2;
    const DyadicIndex ref = DyadicIndex::band_value(n);
    double acc = 0.0;
    for (int dj = -span; dj <= span; ++dj) {
        const int j = ref.j + dj;
        if (j < 0 || j > max_j_) continue;
        acc += window(DyadicIndex::band(j), xi);
    }
    return acc;
}

namespace {

Field project_with(const Field& f, const std::function<double(double)>& window) {
    Spectrum s = analyze(f);
    const int n = s.grid.nx;
    for (int j = 0; j < n; ++j) s[j] *= window(s.grid.xi(j));
    s[s.grid.nyquist_index()] = cplx{0.0, 0.0};
    return synthesize(s);
}

} // namespace

Field project(const Field& f, const DyadicIndex& idx, const WindowFamily& w) {
    return project_with(f, [&](double xi) { return w.window(idx, xi); });
}

Field project_region(const Field& f, DyadicRelation rel, double n, const WindowFamily& w) {
    return project_with(f, [&](double xi) { return w.region_window(rel, n, xi); });
}

Field tilde_project(const Field& f, double n, const WindowFamily& w, TildeWidth width) {
    return project_with(f, [&](double xi) { return w.tilde_window(n, xi, width); });
}

SpacetimeField project(const SpacetimeField& u, const DyadicIndex& idx, const WindowFamily& w) {
    SpacetimeField out;
    out.grid = u.grid;
    out.level_spacing = u.level_spacing;
    out.levels.reserve(u.levels.size());
    for (const Field& f : u.levels) out.levels.push_back(project(f, idx, w));
    return out;
}

SpacetimeField project_region(const SpacetimeField& u, DyadicRelation rel, double n,
                              const WindowFamily& w) {
    SpacetimeField out;
    out.grid = u.grid;
    out.level_spacing = u.level_spacing;
    out.levels.reserve(u.levels.size());
    for (const Field& f : u.levels) out.levels.push_back(project_region(f, rel, n, w));
    return out;
}

double bernstein_ratio(const Field& f, const DyadicIndex& idx, double s, double p,
                       const WindowFamily& w) {
    Field block = project(f, idx, w);
    const double denom_norm = lp_norm(block, p);
    if (denom_norm < 1e-14)
        throw ZeroBand("bernstein_ratio: projected block is numerically zero");
    Field ds = fractional_derivative(block, s, DerivativeKind::homogeneous);
    const double weight = idx.is_low() ? 1.0 : std::pow(idx.value(), s);
    return lp_norm(ds, p) / (weight * denom_norm);
}

} // namespace dnls
