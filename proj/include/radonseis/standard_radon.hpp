#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radonseis/chart.hpp"
#include "radonseis/errors.hpp"
#include "radonseis/kahan.hpp"
#include "radonseis/quadrature.hpp"
#include "radonseis/types.hpp"

namespace radonseis {

// Integrands that expose per-axis factors e_a(t) and a coupled factor
// K(eta); the full integrand is prod_a e_a(xi_a) * K(eta) with eta an
// affine function of xi. Lets radon_of_graph use the cached separable
// quadrature path.
template <class F>
concept AxisSeparable = requires(const F f, std::size_t a, double t) {
    { f.axis_factor(a, t) } -> std::convertible_to<double>;
    { f.coupled_factor(t) } -> std::convertible_to<double>;
};

namespace detail {

template <class G>
struct GraphSlice {
    const G& g;
    std::span<const double> s;
    double u;

    double axis_factor(std::size_t a, double t) const { return g.axis_factor(a, t); }
    double coupled_factor(double t) const { return g.coupled_factor(t); }
    double coupling_term(std::size_t a, double t) const { return s[a] * t; }
    double coupling_offset() const { return u; }
};

// left-to-right integer power, so constants match hand-written products
// bit for bit
inline double ipow(double base, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 0; i < k; ++i) r *= base;
    return r;
}

inline double trap_weight(const Grid1D& g, std::size_t i) {
    const double h = g.step();
    return (i == 0 || i + 1 == g.count) ? 0.5 * h : h;
}

// 4-point Lagrange interpolation of a row sampled on a uniform grid.
// Outside the span returns 0 and raises the flag; in the two edge cells
// the stencil is shifted inward.
inline double cubic_sample(const double* row, const Grid1D& g, double u, bool& outside) {
    outside = false;
    if (u < g.min || u > g.max) {
        outside = true;
        return 0.0;
    }
    const double h = g.step();
    const double t = (u - g.min) / h;
    auto j = static_cast<std::ptrdiff_t>(std::floor(t));
    if (j < 1) j = 1;
    const auto last = static_cast<std::ptrdiff_t>(g.count) - 3;
    if (j > last) j = last;
    const double x = t - static_cast<double>(j);
    const double xm = x + 1.0, x1 = x - 1.0, x2 = x - 2.0;
    return (-x * x1 * x2 / 6.0) * row[j - 1] + (xm * x1 * x2 / 2.0) * row[j] +
           (-xm * x * x2 / 2.0) * row[j + 1] + (xm * x * x1 / 6.0) * row[j + 2];
}

// cubic Lagrange taps for one s axis at a refined position idx/refine;
// on-node positions collapse to a single tap
struct AxisTaps {
    std::size_t idx[4];
    double coef[4];
    int count = 1;
};

inline AxisTaps s_axis_taps(const Grid1D& g, std::size_t fine_idx, std::size_t refine) {
    AxisTaps t;
    if (fine_idx % refine == 0 || g.count < 4) {
        t.idx[0] = fine_idx / refine;
        t.coef[0] = 1.0;
        return t;
    }
    const double pos = static_cast<double>(fine_idx) / static_cast<double>(refine);
    auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    if (j < 1) j = 1;
    const auto last = static_cast<std::ptrdiff_t>(g.count) - 3;
    if (j > last) j = last;
    const double x = pos - static_cast<double>(j);
    const double xm = x + 1.0, x1 = x - 1.0, x2 = x - 2.0;
    t.count = 4;
    t.idx[0] = static_cast<std::size_t>(j - 1);
    t.idx[1] = static_cast<std::size_t>(j);
    t.idx[2] = static_cast<std::size_t>(j + 1);
    t.idx[3] = static_cast<std::size_t>(j + 2);
    t.coef[0] = -x * x1 * x2 / 6.0;
    t.coef[1] = xm * x1 * x2 / 2.0;
    t.coef[2] = -xm * x * x2 / 2.0;
    t.coef[3] = xm * x * x1 / 6.0;
    return t;
}

} // namespace detail

// Integral of F over the graph hyperplane: int_{R^n} F(xi, <s,xi> + u) dxi.
// Equals (1+|s|^2)^{-1/2} times the full Radon transform of F at the chart
// point of (s, u); only the upper hemisphere is ever touched.
template <class F>
double radon_of_graph(const F& f, std::span<const double> s, double u,
                      const QuadratureRule& rule) {
    if (rule.radius.size() != s.size())
        throw config_error("radon_of_graph: rule dimension does not match s");
    if constexpr (AxisSeparable<F>) {
        detail::GraphSlice<F> slice{f, s, u};
        return integrate_nd(slice, rule);
    } else {
        auto integrand = [&](std::span<const double> xi) {
            double eta = u;
            for (std::size_t i = 0; i < s.size(); ++i) eta += s[i] * xi[i];
            return f(xi, eta);
        };
        return integrate_nd(integrand, rule);
    }
}

struct BackprojectOptions {
    bool allow_clamp = false;          // zero-extend out-of-range u lookups
    double max_clamp_fraction = 0.2;   // hard error past this share of s cells
    double supersample_target = 2.0;   // max pole slew per refined s step, in u steps
};

struct ClampStats {
    std::size_t cells = 0;
    std::size_t clamped = 0;
};

// Backprojection core shared by the chart inversion and the seismic
// inversions. The sinogram must hold the n-th u-derivative of graph-Radon
// samples; pole_of_s gives, per s node, the u value the proof evaluates
// the data at. Odd n runs the pv filter in u, even n interpolates. The
// chart Jacobians cancel against the data's own chart factors, so the
// integral over s needs plain trapezoid weights only.
//
// If the pole moves by more than two u steps per s step along some axis,
// the s integral is undersampled even when the sinogram itself resolves
// the data: the pole sweeps across whole features between consecutive
// s nodes. Every pole used here is affine in s, so one probe per axis
// measures the exact slew rate; axes that need it are supersampled with
// cubic interpolation across the (smooth, well resolved) sinogram rows.
template <class PoleFn>
double backproject_chart(const Sinogram& sino, PoleFn&& pole_of_s,
                         const BackprojectOptions& opt = {}, ClampStats* stats_out = nullptr) {
    sino.grid.validate();
    const std::size_t n = sino.grid.s_axes.size();
    if (sino.derivative_order != static_cast<int>(n))
        throw error("backprojection: need derivative order " + std::to_string(n) +
                    ", sinogram has " + std::to_string(sino.derivative_order));
    const Grid1D& ug = sino.grid.u_axis;
    if (sino.values.size() != sino.grid.cell_count())
        throw error("backprojection: sinogram value count does not match grid");
    const double h = ug.step();
    const bool odd = (n % 2 == 1);
    if (!odd && ug.count < 4)
        throw error("backprojection: u grid too small for cubic interpolation");

    std::vector<std::size_t> sext;
    std::size_t cells = 1;
    for (const auto& g : sino.grid.s_axes) {
        sext.push_back(g.count);
        cells *= g.count;
    }

    // clamp fallback shared by both passes: data beyond the grid edge is
    // treated as zero, the kernel is regular on the retained nodes
    auto truncated_hilbert = [&](const double* row, double pole) {
        KahanSum row_acc;
        for (std::size_t j = 0; j < ug.count; ++j) {
            const double uj = ug.node(j);
            if (std::abs(pole - uj) < 0.5 * h) continue;
            double r = row[j] / (pole - uj);
            if (j == 0 || j + 1 == ug.count) r *= 0.5;
            row_acc.add(r);
        }
        return h * row_acc.value();
    };

    // probe the pole slew per axis and pick per-axis refinement factors
    std::vector<std::size_t> refine(n, 1);
    bool plain = true;
    {
        std::vector<double> probe(n);
        for (std::size_t a = 0; a < n; ++a)
            probe[a] = 0.5 * (sino.grid.s_axes[a].min + sino.grid.s_axes[a].max);
        const double p0 = pole_of_s(std::span<const double>(probe));
        for (std::size_t a = 0; a < n; ++a) {
            const Grid1D& g = sino.grid.s_axes[a];
            probe[a] += g.step();
            const double slew = std::abs(pole_of_s(std::span<const double>(probe)) - p0);
            probe[a] = 0.5 * (g.min + g.max);
            const double limit = opt.supersample_target * h;
            if (g.count >= 4 && slew > limit) {
                std::size_t r = static_cast<std::size_t>(std::ceil(slew / limit));
                if (r > 16) r = 16;
                refine[a] = r;
                if (r > 1) plain = false;
            }
        }
    }

    KahanSum acc;
    ClampStats stats;
    std::vector<double> s(n);

    if (plain) {
        for (std::size_t k = 0; k < cells; ++k) {
            double w = 1.0;
            std::size_t rem = k;
            for (std::size_t a = n; a-- > 0;) {
                const std::size_t i = rem % sext[a];
                rem /= sext[a];
                s[a] = sino.grid.s_axes[a].node(i);
                w *= detail::trap_weight(sino.grid.s_axes[a], i);
            }
            const double pole = pole_of_s(std::span<const double>(s));
            const double* row = sino.u_row(k);
            double inner = 0.0;
            ++stats.cells;
            if (odd) {
                if (pole >= ug.min + h && pole <= ug.max - h) {
                    inner = pv_integral(std::span<const double>(row, ug.count), ug, pole);
                } else {
                    ++stats.clamped;
                    if (!opt.allow_clamp)
                        throw error("backprojection: pole " + std::to_string(pole) +
                                    " outside usable u range at s cell " + std::to_string(k));
                    inner = truncated_hilbert(row, pole);
                }
            } else {
                bool outside = false;
                inner = detail::cubic_sample(row, ug, pole, outside);
                if (outside) {
                    ++stats.clamped;
                    if (!opt.allow_clamp)
                        throw error("backprojection: sample point " + std::to_string(pole) +
                                    " outside u grid at s cell " + std::to_string(k));
                }
            }
            acc.add(w * inner);
        }
    } else {
        std::vector<std::size_t> mext(n);
        std::vector<double> fstep(n);
        std::size_t fine_cells = 1;
        for (std::size_t a = 0; a < n; ++a) {
            mext[a] = (sext[a] - 1) * refine[a] + 1;
            fstep[a] = sino.grid.s_axes[a].step() / static_cast<double>(refine[a]);
            fine_cells *= mext[a];
        }
        std::vector<detail::AxisTaps> taps(n);
        std::vector<double> blend(odd ? ug.count : 0);
        for (std::size_t k = 0; k < fine_cells; ++k) {
            double w = 1.0;
            std::size_t rem = k;
            std::size_t combos = 1;
            for (std::size_t a = n; a-- > 0;) {
                const std::size_t i = rem % mext[a];
                rem /= mext[a];
                const Grid1D& g = sino.grid.s_axes[a];
                s[a] = g.min + static_cast<double>(i) * fstep[a];
                w *= ((i == 0 || i + 1 == mext[a]) ? 0.5 : 1.0) * fstep[a];
                taps[a] = detail::s_axis_taps(g, i, refine[a]);
                combos *= static_cast<std::size_t>(taps[a].count);
            }
            const double pole = pole_of_s(std::span<const double>(s));
            double inner = 0.0;
            ++stats.cells;
            if (odd) {
                // the pv filter is linear in the data row, so interpolating
                // rows across s and filtering once is exact for the stencil
                const double* row;
                if (combos == 1) {
                    std::size_t cell = 0;
                    for (std::size_t a = 0; a < n; ++a) cell = cell * sext[a] + taps[a].idx[0];
                    row = sino.u_row(cell);
                } else {
                    std::fill(blend.begin(), blend.end(), 0.0);
                    for (std::size_t c = 0; c < combos; ++c) {
                        std::size_t crem = c;
                        double coef = 1.0;
                        std::size_t cell = 0;
                        for (std::size_t a = 0; a < n; ++a) {
                            const auto& tp = taps[a];
                            const std::size_t pick = crem % static_cast<std::size_t>(tp.count);
                            crem /= static_cast<std::size_t>(tp.count);
                            coef *= tp.coef[pick];
                            cell = cell * sext[a] + tp.idx[pick];
                        }
                        const double* src = sino.u_row(cell);
                        for (std::size_t j = 0; j < ug.count; ++j) blend[j] += coef * src[j];
                    }
                    row = blend.data();
                }
                if (pole >= ug.min + h && pole <= ug.max - h) {
                    inner = pv_integral(std::span<const double>(row, ug.count), ug, pole);
                } else {
                    ++stats.clamped;
                    if (!opt.allow_clamp)
                        throw error("backprojection: pole " + std::to_string(pole) +
                                    " outside usable u range at s sample " + std::to_string(k));
                    inner = truncated_hilbert(row, pole);
                }
            } else {
                if (pole < ug.min || pole > ug.max) {
                    ++stats.clamped;
                    if (!opt.allow_clamp)
                        throw error("backprojection: sample point " + std::to_string(pole) +
                                    " outside u grid at s sample " + std::to_string(k));
                } else {
                    for (std::size_t c = 0; c < combos; ++c) {
                        std::size_t crem = c;
                        double coef = 1.0;
                        std::size_t cell = 0;
                        for (std::size_t a = 0; a < n; ++a) {
                            const auto& tp = taps[a];
                            const std::size_t pick = crem % static_cast<std::size_t>(tp.count);
                            crem /= static_cast<std::size_t>(tp.count);
                            coef *= tp.coef[pick];
                            cell = cell * sext[a] + tp.idx[pick];
                        }
                        bool outside = false;
                        inner += coef * detail::cubic_sample(sino.u_row(cell), ug, pole, outside);
                    }
                }
            }
            acc.add(w * inner);
        }
        cells = fine_cells;
    }

    if (static_cast<double>(stats.clamped) >
        opt.max_clamp_fraction * static_cast<double>(cells))
        throw error("backprojection: " + std::to_string(stats.clamped) + " of " +
                    std::to_string(cells) + " s cells clamped, over the limit");
    if (stats_out) *stats_out = stats;
    return acc.value();
}

// Constant in front of the chart-coordinate backprojection of the n-th
// filtered standard Radon data: odd n gives 2(-1)^{(n-1)/2}/(2pi)^{n+1}
// with the pv filter, even n gives (-1)^{n/2}/(2pi)^n with interpolation.
inline double chart_inversion_constant(std::size_t n) {
    if (n % 2 == 1) {
        const double sign = (((n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
        return 2.0 * sign / detail::ipow(2.0 * M_PI, n + 1);
    }
    const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign / detail::ipow(2.0 * M_PI, n);
}

// Reconstruct F(xi, eta) from a sinogram of d^n/du^n of graph-Radon
// samples. Linear in the sinogram; zero data gives zero everywhere.
inline double invert_radon_chart(const Sinogram& sino, std::span<const double> xi, double eta,
                                 const BackprojectOptions& opt = {},
                                 ClampStats* stats = nullptr) {
    if (xi.size() != sino.grid.s_axes.size())
        throw config_error("invert_radon_chart: point dimension does not match sinogram");
    auto pole = [&](std::span<const double> s) {
        double p = eta;
        for (std::size_t i = 0; i < s.size(); ++i) p -= s[i] * xi[i];
        return p;
    };
    return chart_inversion_constant(xi.size()) * backproject_chart(sino, pole, opt, stats);
}

} // namespace radonseis
