#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radonseis/errors.hpp"
#include "radonseis/kahan.hpp"
#include "radonseis/parallel.hpp"
#include "radonseis/phantom.hpp"
#include "radonseis/quadrature.hpp"
#include "radonseis/standard_radon.hpp"
#include "radonseis/types.hpp"

namespace radonseis {

template <class F>
concept PointwiseFunction = requires(const F f, std::span<const double> x, double y) {
    { f(x, y) } -> std::convertible_to<double>;
};

inline PhantomSpace space_for(TransformKind kind) {
    switch (kind) {
        case TransformKind::P: return PhantomSpace::S_cm_P;
        case TransformKind::Q: return PhantomSpace::S_cm;
        case TransformKind::R: return PhantomSpace::S_cm_R;
        case TransformKind::XStandard: break;
    }
    throw config_error("no phantom space is associated with the standard transform");
}

// Structural membership certificate: the phantom must be built for the
// matching space, satisfy the parameter constraints, and carry axis
// exponents that actually enforce the declared vanishing orders.
inline void require_certified(const Phantom& ph, TransformKind kind) {
    if (ph.space != space_for(kind))
        throw error(std::string("phantom certified for ") + to_string(ph.space) +
                    ", transform " + to_string(kind) + " needs " +
                    to_string(space_for(kind)));
    auto rep = validate_params(ph.params, ph.orders);
    if (!rep.ok) {
        std::string msg = "phantom parameters invalid:";
        for (const auto& v : rep.violations) msg += " [" + v + "]";
        throw error(msg);
    }
    for (std::size_t i = 0; i < ph.axis_profiles.size(); ++i) {
        const auto& prof = ph.axis_profiles[i];
        if (prof.exponent < ph.orders.m[i] + 1)
            throw error("phantom axis " + std::to_string(i) +
                        " exponent too small for vanishing order " +
                        std::to_string(ph.orders.m[i]));
        if (ph.space != PhantomSpace::S_cm && prof.exponent % 2 != 0)
            throw error("phantom axis " + std::to_string(i) +
                        " must be even for space " + to_string(ph.space));
    }
    if (ph.space == PhantomSpace::S_cm_R &&
        (ph.y_profile.exponent < 2 || ph.y_profile.exponent % 2 != 0))
        throw error("R-space phantom needs an even y exponent >= 2");
}

namespace detail {

inline double surf_term(TransformKind kind, double t, double alpha) {
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    const double p = std::pow(a, alpha);
    return (kind == TransformKind::Q && t < 0.0) ? -p : p;
}

} // namespace detail

// Integrand of a pointwise forward transform for a separable f: axis
// factors are the profile evaluations, the coupling is the surface term
// s_i * phi(x_i), and the coupled factor is the y-profile (with the root
// and division for kind R).
struct SeparableForwardSlice {
    TransformKind kind = TransformKind::P;
    const SeparableFunction* f = nullptr;
    const TransformParams* params = nullptr;
    std::span<const double> s;
    double u = 0.0;

    double axis_factor(std::size_t a, double t) const { return f->axis[a].eval(t); }
    double coupling_term(std::size_t a, double t) const {
        return s[a] * detail::surf_term(kind, t, params->alpha[a]);
    }
    double coupling_offset() const { return u; }
    double coupled_factor(double w) const {
        if (kind == TransformKind::R) {
            if (!(w > 0.0)) return 0.0;
            const double y = std::pow(w, 1.0 / *params->beta);
            return f->ypart.eval(y) / y;
        }
        return f->ypart.eval(w);
    }
};

// Pointwise forward transform of an arbitrary function f(x, y); f is
// evaluated at x + c on the surface through (s, u).
template <PointwiseFunction F>
double forward_point(TransformKind kind, const F& f, const TransformParams& params,
                     std::span<const double> s, double u, const QuadratureRule& rule) {
    if (s.size() != params.n)
        throw config_error("forward transform: s dimension does not match params");
    if (rule.radius.size() != params.n)
        throw config_error("forward transform: rule dimension does not match params");
    if (kind == TransformKind::R && !params.beta)
        throw config_error("forward transform: kind R requires beta");
    std::vector<double> xc(params.n);
    auto integrand = [&](std::span<const double> x) -> double {
        double w = u;
        for (std::size_t i = 0; i < params.n; ++i) {
            xc[i] = x[i] + params.c[i];
            w += s[i] * detail::surf_term(kind, x[i], params.alpha[i]);
        }
        if (kind == TransformKind::R) {
            if (!(w > 0.0)) return 0.0;
            const double y = std::pow(w, 1.0 / *params.beta);
            return f(std::span<const double>(xc), y) / y;
        }
        return f(std::span<const double>(xc), w);
    };
    return integrate_nd(integrand, rule);
}

inline double forward_separable(TransformKind kind, const SeparableFunction& fn,
                                const TransformParams& params, std::span<const double> s,
                                double u, const QuadratureRule& rule) {
    if (s.size() != params.n || rule.radius.size() != params.n)
        throw config_error("forward transform: dimension mismatch");
    if (kind == TransformKind::R && !params.beta)
        throw config_error("forward transform: kind R requires beta");
    SeparableForwardSlice slice{kind, &fn, &params, s, u};
    return integrate_nd(slice, rule);
}

inline double forward_P(const Phantom& ph, std::span<const double> s, double u,
                        const QuadratureRule& rule) {
    require_certified(ph, TransformKind::P);
    return forward_separable(TransformKind::P, as_function(ph), ph.params, s, u, rule);
}

inline double forward_Q(const Phantom& ph, std::span<const double> s, double u,
                        const QuadratureRule& rule) {
    require_certified(ph, TransformKind::Q);
    return forward_separable(TransformKind::Q, as_function(ph), ph.params, s, u, rule);
}

inline double forward_R(const Phantom& ph, std::span<const double> s, double u,
                        const QuadratureRule& rule) {
    require_certified(ph, TransformKind::R);
    return forward_separable(TransformKind::R, as_function(ph), ph.params, s, u, rule);
}

inline double forward_kind(const Phantom& ph, TransformKind kind, std::span<const double> s,
                           double u, const QuadratureRule& rule) {
    require_certified(ph, kind);
    return forward_separable(kind, as_function(ph), ph.params, s, u, rule);
}

// Multilinear interpolation of a sampled field; 0 outside the grid.
struct FieldInterpolator {
    const Field* field = nullptr;

    double operator()(std::span<const double> x, double y) const {
        const std::size_t n = field->x_axes.size();
        std::vector<std::size_t> lo(n + 1);
        std::vector<double> fr(n + 1);
        auto locate = [](const Grid1D& g, double v, std::size_t& l, double& f) {
            if (v < g.min || v > g.max) return false;
            const double t = (v - g.min) / g.step();
            auto j = static_cast<std::size_t>(t);
            if (j >= g.count - 1) j = g.count - 2;
            l = j;
            f = t - static_cast<double>(j);
            return true;
        };
        for (std::size_t i = 0; i < n; ++i)
            if (!locate(field->x_axes[i], x[i], lo[i], fr[i])) return 0.0;
        if (!locate(field->y_axis, y, lo[n], fr[n])) return 0.0;

        const auto ext = field->extents();
        double acc = 0.0;
        const std::size_t corners = static_cast<std::size_t>(1) << (n + 1);
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t c = 0; c < corners; ++c) {
            double w = 1.0;
            for (std::size_t a = 0; a <= n; ++a) {
                const bool hi = (c >> a) & 1u;
                idx[a] = lo[a] + (hi ? 1 : 0);
                w *= hi ? fr[a] : 1.0 - fr[a];
            }
            acc += w * field->values[flatten(idx, ext)];
        }
        return acc;
    }
};

inline double forward_field(TransformKind kind, const Field& field,
                            const TransformParams& params, std::span<const double> s, double u,
                            const QuadratureRule& rule) {
    for (std::size_t i = 0; i < params.n; ++i)
        if (field.x_axes.at(i).min > -rule.radius[i] + params.c[i] ||
            field.x_axes.at(i).max < rule.radius[i] + params.c[i])
            throw config_error("forward transform: field grid does not cover truncation box");
    return forward_point(kind, FieldInterpolator{&field}, params, s, u, rule);
}

enum class DerivedKind { FP, FQ, FR };

inline DerivedKind derived_kind_for(TransformKind kind) {
    switch (kind) {
        case TransformKind::P: return DerivedKind::FP;
        case TransformKind::Q: return DerivedKind::FQ;
        case TransformKind::R: return DerivedKind::FR;
        case TransformKind::XStandard: break;
    }
    throw config_error("no derived integrand for the standard transform");
}

// Change-of-variable image of a separable f: the function F(xi, eta)
// whose graph-Radon transform reproduces the seismic transform of f.
// Separable in xi, so it feeds the cached quadrature path directly.
struct DerivedIntegrand {
    DerivedKind kind = DerivedKind::FP;
    SeparableFunction f;
    TransformParams params;

    double axis_factor(std::size_t a, double xi) const {
        const double alpha = params.alpha[a];
        if (kind == DerivedKind::FQ) {
            if (xi == 0.0) return 0.0;
            const double m = std::abs(xi);
            const double root = (xi > 0.0 ? 1.0 : -1.0) * std::pow(m, 1.0 / alpha);
            return f.axis[a].eval(root) / (alpha * std::pow(m, (alpha - 1.0) / alpha));
        }
        if (!(xi > 0.0)) return 0.0;
        const double root = std::pow(xi, 1.0 / alpha);
        return 2.0 * f.axis[a].eval(root) / (alpha * std::pow(xi, (alpha - 1.0) / alpha));
    }

    double coupled_factor(double eta) const {
        if (kind == DerivedKind::FR) {
            if (!(eta > 0.0)) return 0.0;
            const double y = std::pow(eta, 1.0 / *params.beta);
            return f.ypart.eval(y) / y;
        }
        return f.ypart.eval(eta);
    }

    double eval(std::span<const double> xi, double eta) const {
        double v = coupled_factor(eta);
        for (std::size_t a = 0; a < xi.size() && v != 0.0; ++a)
            v *= axis_factor(a, xi[a]);
        return v;
    }

    double operator()(std::span<const double> xi, double eta) const { return eval(xi, eta); }

    // limit of the axis factor as xi -> 0+ (orthant-boundary limit along a
    // graph line; finite because the profile exponent is >= alpha - 1)
    double axis_limit(std::size_t a) const {
        const double alpha = params.alpha[a];
        const auto& coef = f.axis[a].coef;
        std::size_t p0 = coef.size();
        for (std::size_t k = 0; k < coef.size(); ++k)
            if (coef[k] != 0.0) {
                p0 = k;
                break;
            }
        if (p0 == coef.size()) return 0.0;
        const double q = static_cast<double>(p0) - (alpha - 1.0);
        if (q > 0.0) return 0.0;
        if (q < 0.0) throw error("derived integrand: axis factor diverges at the boundary");
        const double base = coef[p0] / alpha;
        return (kind == DerivedKind::FQ) ? base : 2.0 * base;
    }

    // Algebraic inverse identities mapping F back to f; exact up to
    // rounding, used as a cross-check oracle.
    double inverse_map(std::span<const double> x, double y) const {
        const std::size_t n = params.n;
        double pre = 1.0;
        std::vector<double> xi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - params.c[i];
            const double a = std::abs(d);
            pre *= params.alpha[i] * std::pow(a, params.alpha[i] - 1.0);
            if (kind == DerivedKind::FQ)
                xi[i] = (d >= 0.0 ? 1.0 : -1.0) * std::pow(a, params.alpha[i]);
            else
                xi[i] = std::pow(a, params.alpha[i]);
        }
        if (kind == DerivedKind::FP)
            return std::ldexp(pre, -static_cast<int>(n)) * eval(xi, y);
        if (kind == DerivedKind::FQ) return pre * eval(xi, y);
        const double ay = std::abs(y);
        return std::ldexp(pre, -static_cast<int>(n)) * ay *
               eval(xi, std::pow(ay, *params.beta));
    }
};

inline DerivedIntegrand derived_integrand(const Phantom& ph, DerivedKind kind) {
    TransformKind tk = kind == DerivedKind::FP   ? TransformKind::P
                       : kind == DerivedKind::FQ ? TransformKind::Q
                                                 : TransformKind::R;
    require_certified(ph, tk);
    return DerivedIntegrand{kind, as_function(ph), ph.params};
}

// ---------------------------------------------------------------------
// Sinogram sweeps.
//
// The naive sweep evaluates an n-dimensional quadrature per (s, u) cell.
// For separable phantoms the u dependence enters only through the
// y-kernel K(surface + u), which has compact numerical support, so a
// whole u-row for fixed s costs one pass over the x-nodes with each node
// scattering into the u-window its kernel argument can reach. For n = 2
// the inner axis is integrated once per s-node into a table in the
// kernel argument, and the outer axis samples that table.
// ---------------------------------------------------------------------

struct SweepOptions {
    double nodes_per_feature = 4.0;   // x-nodes per y-kernel feature width
    std::size_t max_axis_nodes = 400001;
    double table_step_fraction = 0.025; // inner-table step, fraction of kernel width
    unsigned threads = 0;               // 0: hardware concurrency
};

namespace detail {

// y-kernel of the sweep: K(w) = h(w) for P/Q, h(w^{1/beta})/w^{1/beta}
// restricted to w > 0 for R. lo/hi bound its numerical support.
struct YKernel {
    TransformKind kind = TransformKind::P;
    PolyGauss h;
    double beta = 2.0;
    double lo = 0.0, hi = 0.0;

    static YKernel make(TransformKind kind, const PolyGauss& h, double beta) {
        YKernel k;
        k.kind = kind;
        k.h = h;
        k.beta = beta;
        const double r = h.support_radius(1e-22);
        if (kind == TransformKind::R) {
            k.lo = 0.0;
            k.hi = std::pow(r, beta);
        } else {
            k.lo = -r;
            k.hi = r;
        }
        return k;
    }

    double operator()(double w) const {
        if (kind == TransformKind::R) {
            if (!(w > 0.0)) return 0.0;
            const double y = std::pow(w, 1.0 / beta);
            return h.eval(y) / y;
        }
        return h.eval(w);
    }
};

// odd node count for one sweep axis, resolving the kernel features the
// surface slope compresses in x
inline std::size_t sweep_axis_nodes(double alpha, double s_abs, double R, double kernel_width,
                                    std::size_t base, const SweepOptions& opt) {
    const double slope = alpha * s_abs * std::pow(R, alpha - 1.0);
    std::size_t n = base;
    if (slope > 0.0) {
        const double feature = kernel_width / slope;
        const double need = 2.0 * R / feature * opt.nodes_per_feature;
        if (need + 1.0 > static_cast<double>(n)) n = static_cast<std::size_t>(need) + 1;
    }
    if (n > opt.max_axis_nodes) n = opt.max_axis_nodes;
    if (n % 2 == 0) ++n;
    if (n < 9) n = 9;
    return n;
}

// one u-row of a 1-D sweep: out[j] = integral of e(x) K(s*phi(x) + u_j) dx
inline void sweep_row_1d(const PolyGauss& e, double alpha, TransformKind kind,
                         const YKernel& K, double sv, const Grid1D& ug, double R,
                         std::size_t base_nodes, const SweepOptions& opt,
                         std::vector<KahanSum>& acc) {
    const std::size_t N =
        sweep_axis_nodes(alpha, std::abs(sv), R, K.h.width, base_nodes, opt);
    Grid1D xg{-R, R, N};
    const double hx = xg.step();
    const double du = ug.step();
    for (std::size_t i = 0; i < N; ++i) {
        const double x = xg.node(i);
        double W = e.eval(x) * ((i == 0 || i + 1 == N) ? 0.5 * hx : hx);
        if (W == 0.0) continue;
        const double surf = sv * surf_term(kind, x, alpha);
        // u-window where surf + u lies in the kernel support
        const double ulo = K.lo - surf, uhi = K.hi - surf;
        if (uhi < ug.min || ulo > ug.max) continue;
        auto j0 = static_cast<std::ptrdiff_t>(std::ceil((ulo - ug.min) / du));
        auto j1 = static_cast<std::ptrdiff_t>(std::floor((uhi - ug.min) / du));
        if (j0 < 0) j0 = 0;
        if (j1 >= static_cast<std::ptrdiff_t>(ug.count)) j1 = ug.count - 1;
        for (std::ptrdiff_t j = j0; j <= j1; ++j)
            acc[static_cast<std::size_t>(j)].add(W * K(surf + ug.node(j)));
    }
}

// inner-axis table for the n = 2 sweep: T(v) = integral of e(x) K(s*phi(x)+v) dx
struct InnerTable {
    Grid1D vg{0.0, 1.0, 2};
    std::vector<double> val;
    bool empty = true;

    double sample(double v) const {
        if (empty || v < vg.min || v > vg.max) return 0.0;
        bool outside = false;
        return cubic_sample(val.data(), vg, v, outside);
    }
};

inline InnerTable build_inner_table(const PolyGauss& e, double alpha, TransformKind kind,
                                    const YKernel& K, double sv, double R,
                                    double need_lo, double need_hi, std::size_t base_nodes,
                                    const SweepOptions& opt) {
    InnerTable t;
    // support of T in v: s*phi(x) + v must reach the kernel support
    const double phimax = std::pow(R, alpha);
    double smin = 0.0, smax = 0.0; // range of s*phi over the x span
    if (kind == TransformKind::Q) {
        smin = std::min(sv * phimax, -sv * phimax);
        smax = std::max(sv * phimax, -sv * phimax);
    } else {
        smin = std::min(0.0, sv * phimax);
        smax = std::max(0.0, sv * phimax);
    }
    double lo = std::max(need_lo, K.lo - smax);
    double hi = std::min(need_hi, K.hi - smin);
    if (!(lo < hi)) return t;
    const double dv = std::max(K.h.width * opt.table_step_fraction, 1e-12);
    auto count = static_cast<std::size_t>(std::ceil((hi - lo) / dv)) + 4;
    if (count < 8) count = 8;
    t.vg = Grid1D{lo - dv, lo - dv + dv * static_cast<double>(count - 1), count};
    std::vector<KahanSum> acc(count);
    sweep_row_1d(e, alpha, kind, K, sv, t.vg, R, base_nodes, opt, acc);
    t.val.resize(count);
    for (std::size_t i = 0; i < count; ++i) t.val[i] = acc[i].value();
    t.empty = false;
    return t;
}

} // namespace detail

// Sweep of a separable function; derivative_order is recorded on the
// output (the caller supplies fn already differentiated in y).
inline Sinogram forward_sinogram_fn(const SeparableFunction& fn, const TransformParams& params,
                                    TransformKind kind, const SinogramGrid& grid,
                                    const QuadratureRule& rule, const SweepOptions& opt = {},
                                    int derivative_order = 0) {
    grid.validate();
    rule.validate();
    if (grid.s_axes.size() != params.n || rule.radius.size() != params.n)
        throw config_error("forward_sinogram: dimension mismatch");
    if (kind == TransformKind::R && !params.beta)
        throw config_error("forward_sinogram: kind R requires beta");
    if (rule.scheme != QuadScheme::trapezoid_uniform)
        throw config_error("forward_sinogram: sweeps require the trapezoid scheme");

    Sinogram out;
    out.kind = kind;
    out.params = params;
    out.grid = grid;
    out.derivative_order = derivative_order;
    out.values.assign(grid.cell_count(), 0.0);

    const double beta = params.beta.value_or(2.0);
    const detail::YKernel K = detail::YKernel::make(kind, fn.ypart, beta);
    const Grid1D& ug = grid.u_axis;
    const unsigned threads = opt.threads == 0 ? default_thread_count() : opt.threads;

    if (params.n == 1) {
        const Grid1D& sg = grid.s_axes[0];
        parallel_for(0, sg.count, threads, [&](std::size_t si) {
            std::vector<KahanSum> acc(ug.count);
            detail::sweep_row_1d(fn.axis[0], params.alpha[0], kind, K, sg.node(si), ug,
                                 rule.radius[0], rule.nodes[0], opt, acc);
            double* row = out.u_row(si);
            for (std::size_t j = 0; j < ug.count; ++j) row[j] = acc[j].value();
        });
    } else if (params.n == 2) {
        const Grid1D& sg0 = grid.s_axes[0];
        const Grid1D& sg1 = grid.s_axes[1];
        // needed kernel-argument span for tables on either axis
        auto need_span = [&](double other_smax, double other_phimax, double& lo, double& hi) {
            lo = ug.min - other_smax * other_phimax;
            hi = ug.max + other_smax * other_phimax;
        };
        const double phimax0 = std::pow(rule.radius[0], params.alpha[0]);
        const double phimax1 = std::pow(rule.radius[1], params.alpha[1]);
        const double smax0 = std::max(std::abs(sg0.min), std::abs(sg0.max));
        const double smax1 = std::max(std::abs(sg1.min), std::abs(sg1.max));

        // tables for using axis 1 (resp. axis 0) as the inner integral
        std::vector<detail::InnerTable> inner1(sg1.count), inner0(sg0.count);
        parallel_for(0, sg1.count, threads, [&](std::size_t i) {
            double lo, hi;
            need_span(smax0, phimax0, lo, hi);
            inner1[i] = detail::build_inner_table(fn.axis[1], params.alpha[1], kind, K,
                                                  sg1.node(i), rule.radius[1], lo, hi,
                                                  rule.nodes[1], opt);
        });
        parallel_for(0, sg0.count, threads, [&](std::size_t i) {
            double lo, hi;
            need_span(smax1, phimax1, lo, hi);
            inner0[i] = detail::build_inner_table(fn.axis[0], params.alpha[0], kind, K,
                                                  sg0.node(i), rule.radius[0], lo, hi,
                                                  rule.nodes[0], opt);
        });

        parallel_for(0, sg0.count * sg1.count, threads, [&](std::size_t cell) {
            const std::size_t i0 = cell / sg1.count;
            const std::size_t i1 = cell % sg1.count;
            const double s0 = sg0.node(i0), s1 = sg1.node(i1);
            // inner axis: the one with larger |s| (compresses kernel
            // features the most, so resolve it with the dedicated table);
            // ties go to axis 1
            const bool inner_is_1 = std::abs(s1) >= std::abs(s0);
            const detail::InnerTable& tab = inner_is_1 ? inner1[i1] : inner0[i0];
            const std::size_t oa = inner_is_1 ? 0 : 1;
            const double so = inner_is_1 ? s0 : s1;
            const double Ro = rule.radius[oa];
            const std::size_t N = detail::sweep_axis_nodes(
                params.alpha[oa], std::abs(so), Ro, K.h.width, rule.nodes[oa], opt);
            Grid1D xg{-Ro, Ro, N};
            const double hx = xg.step();
            std::vector<KahanSum> acc(ug.count);
            for (std::size_t i = 0; i < N; ++i) {
                const double x = xg.node(i);
                double W = fn.axis[oa].eval(x) * ((i == 0 || i + 1 == N) ? 0.5 * hx : hx);
                if (W == 0.0) continue;
                const double surf = so * detail::surf_term(kind, x, params.alpha[oa]);
                for (std::size_t j = 0; j < ug.count; ++j) {
                    const double v = tab.sample(surf + ug.node(j));
                    if (v != 0.0) acc[j].add(W * v);
                }
            }
            double* row = out.u_row(cell);
            for (std::size_t j = 0; j < ug.count; ++j) row[j] = acc[j].value();
        });
    } else {
        // general fallback: per-cell quadrature
        const auto ext = grid.extents();
        const std::size_t cells = out.s_cell_count();
        parallel_for(0, cells, threads, [&](std::size_t cell) {
            std::vector<double> s(params.n);
            std::size_t rem = cell;
            for (std::size_t a = params.n; a-- > 0;) {
                s[a] = grid.s_axes[a].node(rem % ext[a]);
                rem /= ext[a];
            }
            double* row = out.u_row(cell);
            for (std::size_t j = 0; j < ug.count; ++j)
                row[j] = forward_separable(kind, fn, params, s, ug.node(j), rule);
        });
    }

    out.meta["truncation_radius"] = [&] {
        std::string r;
        for (double v : rule.radius) r += (r.empty() ? "" : ",") + std::to_string(v);
        return r;
    }();
    out.check_finite();
    return out;
}

inline Sinogram forward_sinogram(const Phantom& ph, TransformKind kind,
                                 const SinogramGrid& grid, const QuadratureRule& rule,
                                 const SweepOptions& opt = {}) {
    require_certified(ph, kind);
    return forward_sinogram_fn(as_function(ph), ph.params, kind, grid, rule, opt, 0);
}

// Sinogram sweep for an arbitrary pointwise function (no separable
// structure assumed): per-cell quadrature.
template <PointwiseFunction F>
Sinogram forward_sinogram_pointwise(TransformKind kind, const F& f,
                                    const TransformParams& params, const SinogramGrid& grid,
                                    const QuadratureRule& rule, unsigned threads = 0) {
    grid.validate();
    Sinogram out;
    out.kind = kind;
    out.params = params;
    out.grid = grid;
    out.values.assign(grid.cell_count(), 0.0);
    const auto ext = grid.extents();
    if (threads == 0) threads = default_thread_count();
    parallel_for(0, out.s_cell_count(), threads, [&](std::size_t cell) {
        std::vector<double> s(params.n);
        std::size_t rem = cell;
        for (std::size_t a = params.n; a-- > 0;) {
            s[a] = grid.s_axes[a].node(rem % ext[a]);
            rem /= ext[a];
        }
        double* row = out.u_row(cell);
        for (std::size_t j = 0; j < grid.u_axis.count; ++j)
            row[j] = forward_point(kind, f, params, s, grid.u_axis.node(j), rule);
    });
    out.check_finite();
    return out;
}

enum class FilterMethod { finite_difference, exact_dy };

inline const char* to_string(FilterMethod m) {
    return m == FilterMethod::finite_difference ? "finite_difference" : "exact_dy";
}

// n-th u-derivative of a sinogram. finite_difference composes order-4
// central first-derivative stencils, trimming two u-nodes per side per
// application. exact_dy re-runs the sweep with the y-profile
// differentiated (valid for P and Q, where u enters only through the
// profile argument; for R, u also moves the domain and the root, so the
// identity fails and the method is rejected).
inline Sinogram du_n_filter(const Sinogram& sino, FilterMethod method,
                            const Phantom* source = nullptr,
                            const QuadratureRule* rule = nullptr,
                            const SweepOptions& opt = {}) {
    const auto n = static_cast<int>(sino.grid.s_axes.size());
    if (sino.derivative_order != 0)
        throw error("du_n_filter: input sinogram is already filtered");

    if (method == FilterMethod::exact_dy) {
        if (sino.kind == TransformKind::R)
            throw error("du_n_filter: exact_dy unsupported for kind R: use finite_difference");
        if (source == nullptr || rule == nullptr)
            throw config_error("du_n_filter: exact_dy needs the source phantom and rule");
        require_certified(*source, sino.kind);
        Sinogram out = forward_sinogram_fn(phantom_dy(*source, n), source->params, sino.kind,
                                           sino.grid, *rule, opt, n);
        out.meta["filter_method"] = "exact_dy";
        return out;
    }

    const Grid1D& ug = sino.grid.u_axis;
    const std::size_t trim = 2 * static_cast<std::size_t>(n);
    if (ug.count < 2 * trim + 5)
        throw error("du_n_filter: u grid too small for " + std::to_string(n) +
                    " stencil applications");
    const double h = ug.step();
    const std::size_t cells = sino.s_cell_count();

    std::vector<double> cur = sino.values;
    std::size_t ucount = ug.count;
    for (int pass = 0; pass < n; ++pass) {
        const std::size_t next_count = ucount - 4;
        std::vector<double> next(cells * next_count);
        for (std::size_t c = 0; c < cells; ++c) {
            const double* row = cur.data() + c * ucount;
            double* orow = next.data() + c * next_count;
            for (std::size_t j = 0; j < next_count; ++j) {
                const std::size_t k = j + 2;
                orow[j] = (row[k - 2] - 8.0 * row[k - 1] + 8.0 * row[k + 1] - row[k + 2]) /
                          (12.0 * h);
            }
        }
        cur = std::move(next);
        ucount = next_count;
    }

    Sinogram out;
    out.kind = sino.kind;
    out.params = sino.params;
    out.grid = sino.grid;
    out.grid.u_axis = Grid1D{ug.min + h * static_cast<double>(trim),
                             ug.max - h * static_cast<double>(trim), ucount};
    out.values = std::move(cur);
    out.derivative_order = n;
    out.meta = sino.meta;
    out.meta["filter_method"] = "finite_difference";
    out.meta["filter_trim_per_side"] = std::to_string(trim);
    out.check_finite();
    return out;
}

// Cross-check of the forward transforms against the graph-Radon integral
// of the derived integrand. Both sides are quadratures over different
// variables, so agreement is a genuine consistency test.
struct ReductionSample {
    std::vector<double> s;
    double u = 0.0;
    double direct = 0.0;
    double via_graph = 0.0;
};

struct ReductionReport {
    double max_rel_dev = 0.0; // |direct - via_graph| / max |direct|
    double scale = 0.0;
    std::vector<ReductionSample> samples;
};

inline ReductionReport reduction_identity_check(
    const Phantom& ph, TransformKind kind,
    const std::vector<std::pair<std::vector<double>, double>>& sample_points,
    const QuadratureRule& forward_rule, const QuadratureRule& xi_rule) {
    require_certified(ph, kind);
    const DerivedIntegrand F = derived_integrand(ph, derived_kind_for(kind));
    ReductionReport rep;
    for (const auto& [s, u] : sample_points) {
        ReductionSample smp;
        smp.s = s;
        smp.u = u;
        smp.direct = forward_kind(ph, kind, s, u, forward_rule);
        smp.via_graph = radon_of_graph(F, s, u, xi_rule);
        rep.scale = std::max(rep.scale, std::abs(smp.direct));
        rep.samples.push_back(std::move(smp));
    }
    const double denom = rep.scale > 0.0 ? rep.scale : 1.0;
    for (const auto& smp : rep.samples)
        rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(smp.direct - smp.via_graph) / denom);
    return rep;
}

} // namespace radonseis
