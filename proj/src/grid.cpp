#include "dnls/grid.hpp"

#include <cmath>
#include <string>

namespace dnls {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

GridSpec make_grid(int nx, double length, double dt, double horizon, double dealias_fraction) {
    if (!power_of_two(nx) || nx < 16)
        throw ConfigInvalid("nx must be a power of two >= 16, got " + std::to_string(nx));
    if (!(length > 0.0))
        throw ConfigInvalid("domain length must be positive");
    if (!(dt > 0.0) || !(horizon > 0.0) || dt > horizon * (1.0 + 1e-12))
        throw ConfigInvalid("need 0 < dt <= horizon");
    const double ratio = horizon / dt;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * ratio)
        throw ConfigInvalid("horizon/dt must be integral to one part in 1e9");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
        throw ConfigInvalid("dealias_fraction must lie in (0, 1]");
    GridSpec g;
    g.nx = nx;
    g.length = length;
    g.dt = dt;
    g.horizon = horizon;
    g.dealias_fraction = dealias_fraction;
    return g;
}

GridSpec refine_space_time(const GridSpec& g) {
    return make_grid(2 * g.nx, g.length, 0.5 * g.dt, g.horizon, g.dealias_fraction);
}

GridSpec refine_space(const GridSpec& g) {
    return make_grid(2 * g.nx, g.length, g.dt, g.horizon, g.dealias_fraction);
}

GridSpec refine_time(const GridSpec& g) {
    return make_grid(g.nx, g.length, 0.5 * g.dt, g.horizon, g.dealias_fraction);
}

bool Field::finite() const {
    for (const cplx& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

SpacetimeField restrict_horizon(const SpacetimeField& u, double t_max) {
    SpacetimeField out;
    out.grid = u.grid;
    out.level_spacing = u.level_spacing;
    for (int l = 0; l < u.steps(); ++l) {
        if (u.time(l) <= t_max * (1.0 + 1e-12)) out.levels.push_back(u.slice(l));
    }
    if (out.levels.empty()) throw TooFewTimeLevels("time restriction left no levels");
    return out;
}

} // namespace dnls
