#include "dnls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace dnls {

namespace {

// Process-wide plan cache. Plans are created under a lock (the FFTW planner
// is not thread-safe); execution through fftw_execute_dft on distinct
// buffers is re-entrant, so concurrent transforms are fine.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void forward(int n, const cplx* in, cplx* out) { run(n, +1, in, out); }
    void backward(int n, const cplx* in, cplx* out) { run(n, -1, in, out); }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;

    fftw_plan plan_for(int n, int dir) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, dir);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
            dir > 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    void run(int n, int dir, const cplx* in, cplx* out) {
        fftw_plan p = plan_for(n, dir);
        // Out-of-place plan: in/out must differ, which callers guarantee.
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }
};

void require_finite(const Field& f, const char* who) {
    if (!f.finite()) throw NonFiniteValue(std::string(who) + ": non-finite input field");
}

} // namespace

Spectrum analyze(const Field& f) {
    require_finite(f, "analyze");
    const int n = f.grid.nx;
    Spectrum s(f.grid);
    PlanCache::instance().forward(n, f.values.data(), s.coeff.data());
    // Grid starts at -L/2, so the continuum kernel differs from the DFT
    // kernel by exp(i xi_m L/2) = (-1)^m.
    const double dx = f.grid.dx();
    for (int j = 0; j < n; ++j) {
        const double sign = (f.grid.mode(j) & 1) ? -1.0 : 1.0;
        s[j] *= dx * sign;
    }
    return s;
}

Field synthesize(const Spectrum& s) {
    const int n = s.grid.nx;
    std::vector<cplx> tmp(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double sign = (s.grid.mode(j) & 1) ? -1.0 : 1.0;
        tmp[static_cast<std::size_t>(j)] = s[j] * sign;
    }
    Field f(s.grid);
    PlanCache::instance().backward(n, tmp.data(), f.values.data());
    const double scale = 1.0 / s.grid.length;
    for (cplx& z : f.values) z *= scale;
    return f;
}

void apply_multiplier_inplace(Spectrum& s, const std::function<cplx(double)>& symbol) {
    const int n = s.grid.nx;
    for (int j = 0; j < n; ++j) s[j] *= symbol(s.grid.xi(j));
    s[s.grid.nyquist_index()] = cplx{0.0, 0.0};
}

Field apply_multiplier(const Field& f, const std::function<cplx(double)>& symbol) {
    Spectrum s = analyze(f);
    apply_multiplier_inplace(s, symbol);
    return synthesize(s);
}

Field fractional_derivative(const Field& f, double s, DerivativeKind kind) {
    if (kind == DerivativeKind::homogeneous) {
        if (s < -1.0)
            throw std::invalid_argument("fractional_derivative: homogeneous order must be >= -1");
        Spectrum spec = analyze(f);
        if (s < 0.0) {
            // |xi|^s blows up at xi = 0; demand a mean-free field.
            double scale = 0.0;
            for (const cplx& z : spec.coeff) scale = std::max(scale, std::abs(z));
            if (std::abs(spec[0]) > 1e-12 * std::max(scale, 1e-300))
                throw NegativeHomogeneousOnMeanful(
                    "fractional_derivative: D_x^s with s<0 needs a mean-free field");
        }
        const int n = spec.grid.nx;
        for (int j = 0; j < n; ++j) {
            const double axi = std::abs(spec.grid.xi(j));
            if (axi == 0.0)
                spec[j] *= (s == 0.0) ? 1.0 : 0.0;
            else
                spec[j] *= std::pow(axi, s);
        }
        spec[spec.grid.nyquist_index()] = cplx{0.0, 0.0};
        return synthesize(spec);
    }
    return apply_multiplier(f, [s](double xi) -> cplx {
        return std::pow(1.0 + xi * xi, 0.5 * s);
    });
}

Field propagate(const Field& f, double t) {
    return apply_multiplier(f, [t](double xi) -> cplx {
        return std::exp(cplx{0.0, t * xi * xi});
    });
}

Field primitive(const Field& f, double edge_tol) {
    require_finite(f, "primitive");
    const double edge = std::abs(f[0]);
    if (edge > edge_tol)
        throw EdgeDecayViolation("primitive: |f(-L/2)| = " + std::to_string(edge) +
                                 " exceeds edge_tol " + std::to_string(edge_tol));
    Spectrum s = analyze(f);
    const cplx mean = s[0] / f.grid.length;
    const int n = s.grid.nx;
    Spectrum anti(s.grid);
    for (int j = 1; j < n; ++j) {
        if (j == s.grid.nyquist_index()) continue;
        anti[j] = s[j] / cplx{0.0, s.grid.xi(j)};
    }
    Field osc = synthesize(anti);
    const cplx left = osc[0];
    Field out(f.grid);
    for (int i = 0; i < f.grid.nx; ++i) {
        const double xr = f.grid.x(i) + 0.5 * f.grid.length;
        out[i] = osc[i] - left + mean * xr;
    }
    return out;
}

Field pointwise_power_modulus(const Field& f, double k) {
    if (k < 0.0) throw std::invalid_argument("pointwise_power_modulus: k must be >= 0");
    Field out(f.grid);
    if (k == 0.0) {
        for (int i = 0; i < f.grid.nx; ++i) out[i] = cplx{1.0, 0.0};
        return out;
    }
    for (int i = 0; i < f.grid.nx; ++i) {
        const double a = std::abs(f[i]);
        // exp(k log a) handles non-integer k; anything below the double
        // denormal range maps to 0.
        out[i] = (a < 1e-300) ? cplx{0.0, 0.0} : cplx{std::exp(k * std::log(a)), 0.0};
    }
    return out;
}

Field derivative(const Field& f) {
    return apply_multiplier(f, [](double xi) -> cplx { return cplx{0.0, xi}; });
}

void dealias_inplace(Spectrum& s) {
    const int n = s.grid.nx;
    const double cutoff = s.grid.dealias_fraction * (n / 2);
    for (int j = 0; j < n; ++j) {
        if (std::abs(static_cast<double>(s.grid.mode(j))) > cutoff) s[j] = cplx{0.0, 0.0};
    }
    s[s.grid.nyquist_index()] = cplx{0.0, 0.0};
}

double l2_norm(const Field& f) {
    long double acc = 0.0L;
    for (const cplx& z : f.values) acc += static_cast<long double>(std::norm(z));
    return std::sqrt(static_cast<double>(acc * f.grid.dx()));
}

double lp_norm(const Field& f, double p) {
    if (p == kInfinity) {
        double m = 0.0;
        for (const cplx& z : f.values) m = std::max(m, std::abs(z));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    long double acc = 0.0L;
    for (const cplx& z : f.values) acc += std::pow(static_cast<long double>(std::abs(z)), p);
    return static_cast<double>(std::pow(acc * f.grid.dx(), 1.0L / p));
}

} // namespace dnls
