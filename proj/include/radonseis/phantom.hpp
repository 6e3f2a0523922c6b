#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "radonseis/errors.hpp"
#include "radonseis/types.hpp"

namespace radonseis {

// Polynomial times Gaussian, P(t) * exp(-(t/w)^2). Closed under
// differentiation, which gives exact y-derivatives of every phantom.
struct PolyGauss {
    std::vector<double> coef; // coef[k] * t^k
    double width = 1.0;

    static PolyGauss monomial(int p, double w) {
        PolyGauss g;
        g.coef.assign(static_cast<std::size_t>(p) + 1, 0.0);
        g.coef.back() = 1.0;
        g.width = w;
        return g;
    }

    double eval(double t) const {
        double poly = 0.0;
        for (std::size_t k = coef.size(); k-- > 0;) poly = poly * t + coef[k];
        const double z = t / width;
        return poly * std::exp(-z * z);
    }

    // d/dt (P e^{-(t/w)^2}) = (P' - 2t/w^2 P) e^{-(t/w)^2}
    PolyGauss derivative() const {
        PolyGauss d;
        d.width = width;
        d.coef.assign(coef.size() + 1, 0.0);
        for (std::size_t k = 1; k < coef.size(); ++k)
            d.coef[k - 1] += static_cast<double>(k) * coef[k];
        const double c2 = 2.0 / (width * width);
        for (std::size_t k = 0; k < coef.size(); ++k) d.coef[k + 1] -= c2 * coef[k];
        return d;
    }

    PolyGauss derivative(int order) const {
        PolyGauss g = *this;
        for (int k = 0; k < order; ++k) g = g.derivative();
        return g;
    }

    // |t| beyond which |eval| stays below eps * max-scale; used for
    // support windows in sinogram sweeps.
    double support_radius(double eps = 1e-16) const {
        double r = width * std::sqrt(-std::log(eps));
        int deg = 0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            if (coef[k] != 0.0) deg = static_cast<int>(k);
        // crude inflation for the polynomial growth
        for (int it = 0; it < 4; ++it) {
            double z = r / width;
            double corr = deg > 0 ? std::sqrt(z * z + deg * std::log(1.0 + z)) : z;
            r = width * corr;
        }
        return r;
    }
};

enum class AxisParity { even_forced, free_parity };
enum class PhantomSpace { S_cm, S_cm_P, S_cm_R };

inline const char* to_string(PhantomSpace s) {
    switch (s) {
        case PhantomSpace::S_cm: return "S_cm";
        case PhantomSpace::S_cm_P: return "S_cm_P";
        case PhantomSpace::S_cm_R: return "S_cm_R";
    }
    return "?";
}

// One separable factor e(t) = t^p * exp(-(t/w)^2).
struct AxisProfile {
    int exponent = 0;
    double width = 1.0;
    AxisParity parity = AxisParity::free_parity;
};

// Product-form test function f(x, y) = prod_i e_i(x_i - c_i) * h(y) with
// certified membership in one of the transform's function spaces.
struct Phantom {
    TransformParams params;
    VanishingOrders orders;
    std::vector<AxisProfile> axis_profiles;
    AxisProfile y_profile;
    PhantomSpace space = PhantomSpace::S_cm;

    double eval(std::span<const double> x, double y) const {
        double v = axis_pg(y_profile).eval(y);
        for (std::size_t i = 0; i < axis_profiles.size(); ++i)
            v *= axis_pg(axis_profiles[i]).eval(x[i] - params.c[i]);
        return v;
    }

    static PolyGauss axis_pg(const AxisProfile& p) {
        return PolyGauss::monomial(p.exponent, p.width);
    }
};

// Evaluable product-form function; the representation phantom_dy returns.
struct SeparableFunction {
    std::vector<PolyGauss> axis; // factors of (x_i - c_i)
    PolyGauss ypart;
    std::vector<double> center;

    double eval(std::span<const double> x, double y) const {
        double v = ypart.eval(y);
        for (std::size_t i = 0; i < axis.size(); ++i) v *= axis[i].eval(x[i] - center[i]);
        return v;
    }
};

inline SeparableFunction as_function(const Phantom& ph) {
    SeparableFunction f;
    f.center = ph.params.c;
    for (const auto& p : ph.axis_profiles) f.axis.push_back(Phantom::axis_pg(p));
    f.ypart = Phantom::axis_pg(ph.y_profile);
    return f;
}

// Exact partial_y^k f; closed form because the y-profile is poly x Gaussian.
inline SeparableFunction phantom_dy(const Phantom& ph, int order) {
    SeparableFunction f = as_function(ph);
    f.ypart = f.ypart.derivative(order);
    return f;
}

inline double eval_phantom(const Phantom& ph, std::span<const double> x, double y) {
    return ph.eval(x, y);
}

// Minimal-exponent phantom for the requested space: p_i is the smallest
// integer >= m_i + 1 with the parity the space demands; the y exponent is 0
// except for S_cm_R, where it is the smallest even integer >= 2.
inline Phantom make_phantom(const TransformParams& params, const VanishingOrders& orders,
                            PhantomSpace space, std::span<const double> axis_widths,
                            double y_width) {
    auto rep = validate_params(params, orders);
    if (!rep.ok) {
        std::string msg = "make_phantom: invalid parameters:";
        for (const auto& v : rep.violations) msg += " [" + v + "]";
        throw config_error(msg);
    }
    if (axis_widths.size() != params.n)
        throw config_error("make_phantom: need one axis width per dimension");
    if (space == PhantomSpace::S_cm_R && !params.beta)
        throw config_error("make_phantom: S_cm_R requires beta");

    Phantom ph;
    ph.params = params;
    ph.orders = orders;
    ph.space = space;
    const bool even_axes = (space != PhantomSpace::S_cm);
    for (std::size_t i = 0; i < params.n; ++i) {
        int p = orders.m[i] + 1;
        if (even_axes && p % 2 != 0) ++p;
        AxisProfile prof;
        prof.exponent = p;
        prof.width = axis_widths[i];
        prof.parity = even_axes ? AxisParity::even_forced : AxisParity::free_parity;
        ph.axis_profiles.push_back(prof);
    }
    ph.y_profile.width = y_width;
    if (space == PhantomSpace::S_cm_R) {
        ph.y_profile.exponent = 2;
        ph.y_profile.parity = AxisParity::even_forced;
    } else {
        ph.y_profile.exponent = 0;
        ph.y_profile.parity = AxisParity::free_parity;
    }
    return ph;
}

struct MembershipReport {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string what) {
        ok = false;
        failures.push_back(std::move(what));
    }
};

// Numerical certificate for Definition-style membership: axis symmetry,
// y symmetry, vanishing x-derivatives at the center up to order m_i, and
// f(x + c, 0) = 0 for the R space. Sample points are seeded and recorded.
template <class F>
MembershipReport certify_membership_fn(const F& f, const TransformParams& params,
                                       const VanishingOrders& orders, PhantomSpace space,
                                       std::uint64_t seed = 42) {
    MembershipReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    const std::size_t n = params.n;

    std::vector<double> x(n), xr(n);
    const int samples = 50;

    // reference scale from the sample sweep
    double scale = 0.0;
    std::vector<std::vector<double>> pts;
    std::vector<double> ys;
    for (int t = 0; t < samples; ++t) {
        for (std::size_t i = 0; i < n; ++i) x[i] = params.c[i] + unit(rng);
        const double y = unit(rng);
        pts.push_back(x);
        ys.push_back(y);
        scale = std::max(scale, std::abs(f(std::span<const double>(x), y)));
    }
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-8 * scale;

    if (space == PhantomSpace::S_cm_P || space == PhantomSpace::S_cm_R) {
        for (std::size_t i = 0; i < n; ++i) {
            double worst = 0.0;
            for (int t = 0; t < samples; ++t) {
                x = pts[t];
                xr = x;
                xr[i] = 2.0 * params.c[i] - x[i];
                worst = std::max(worst, std::abs(f(std::span<const double>(x), ys[t]) -
                                                 f(std::span<const double>(xr), ys[t])));
            }
            if (worst > tol)
                rep.fail("axis symmetry (symmetry1) violated on axis " + std::to_string(i) +
                         ", max dev " + std::to_string(worst));
        }
    }
    if (space == PhantomSpace::S_cm_R) {
        double worst = 0.0;
        for (int t = 0; t < samples; ++t)
            worst = std::max(worst, std::abs(f(std::span<const double>(pts[t]), ys[t]) -
                                             f(std::span<const double>(pts[t]), -ys[t])));
        if (worst > tol) rep.fail("y symmetry (symmetry2) violated, max dev " + std::to_string(worst));

        double worst0 = 0.0;
        for (int t = 0; t < samples; ++t)
            worst0 = std::max(worst0, std::abs(f(std::span<const double>(pts[t]), 0.0)));
        if (worst0 > tol) rep.fail("f(x+c, 0) != 0, max " + std::to_string(worst0));
    }

    // Vanishing derivatives at x_i = c_i: binomial central difference of
    // order k, twice Richardson-extrapolated (removes the h^2 and h^4
    // terms). Rounding noise grows like eps/h^k, so orders above 3 use a
    // larger step and a correspondingly looser gate.
    auto central_diff = [&](const std::vector<double>& base, std::size_t axis_i, int k,
                            double y, double h) {
        if (k == 0) return f(std::span<const double>(base), y);
        double sum = 0.0;
        double binom = 1.0;
        std::vector<double> xx = base;
        for (int j = 0; j <= k; ++j) {
            xx[axis_i] = params.c[axis_i] + (0.5 * k - j) * h;
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            sum += sgn * binom * f(std::span<const double>(xx), y);
            binom = binom * (k - j) / (j + 1.0);
        }
        return sum / std::pow(h, k);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k <= orders.m[i]; ++k) {
            const double h = (k <= 3) ? 0.02 : 0.2;
            const double gate = (k <= 3) ? 1e-8 * scale : 1e-4 * scale;
            double worst = 0.0;
            for (int t = 0; t < 8; ++t) {
                x = pts[t];
                x[i] = params.c[i];
                const double y = ys[t];
                const double d1 = central_diff(x, i, k, y, h);
                const double d2 = central_diff(x, i, k, y, 0.5 * h);
                const double d4 = central_diff(x, i, k, y, 0.25 * h);
                const double r1 = (4.0 * d2 - d1) / 3.0;
                const double r2 = (4.0 * d4 - d2) / 3.0;
                const double der = (16.0 * r2 - r1) / 15.0;
                worst = std::max(worst, std::abs(der));
            }
            if (worst > gate)
                rep.fail("derivative order " + std::to_string(k) + " on axis " +
                         std::to_string(i) + " does not vanish at the center (max " +
                         std::to_string(worst) + ")");
        }
    }
    return rep;
}

inline MembershipReport certify_membership(const Phantom& ph, std::uint64_t seed = 42) {
    auto fn = as_function(ph);
    return certify_membership_fn(
        [&fn](std::span<const double> x, double y) { return fn.eval(x, y); }, ph.params,
        ph.orders, ph.space, seed);
}

} // namespace radonseis
