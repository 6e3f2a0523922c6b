#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radonseis/errors.hpp"
#include "radonseis/grid.hpp"
#include "radonseis/kahan.hpp"

namespace radonseis {

enum class QuadScheme { trapezoid_uniform, gauss_legendre_panels };

// Deterministic tensor-product rule over the box prod_i [-R_i, R_i].
struct QuadratureRule {
    QuadScheme scheme = QuadScheme::trapezoid_uniform;
    std::vector<double> radius;       // per axis, > 0
    std::vector<std::size_t> nodes;   // per axis, >= 8

    void validate() const {
        if (radius.empty() || radius.size() != nodes.size())
            throw config_error("quadrature rule needs matching radius/nodes per axis");
        for (double r : radius)
            if (!(r > 0.0)) throw config_error("quadrature truncation radius must be > 0");
        for (std::size_t n : nodes)
            if (n < 8) throw config_error("quadrature needs >= 8 nodes per axis");
    }

    static QuadratureRule trapezoid(std::vector<double> radii, std::vector<std::size_t> counts) {
        QuadratureRule r;
        r.radius = std::move(radii);
        r.nodes = std::move(counts);
        return r;
    }
};

namespace detail {

// Nodes/weights of the 16-point Gauss-Legendre rule on [-1, 1], computed
// once by Newton iteration on the Legendre recurrence.
inline const std::array<std::array<double, 16>, 2>& gauss16() {
    static const std::array<std::array<double, 16>, 2> table = [] {
        std::array<std::array<double, 16>, 2> t{};
        constexpr int q = 16;
        for (int k = 0; k < q; ++k) {
            double x = std::cos(M_PI * (k + 0.75) / (q + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= q; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = q * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) {
                    // one polishing pass after convergence
                    p0 = 1.0;
                    p1 = x;
                    for (int j = 2; j <= q; ++j) {
                        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = q * (x * p1 - p0) / (x * x - 1.0);
                    break;
                }
            }
            t[0][q - 1 - k] = x;
            t[1][q - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return t;
    }();
    return table;
}

// Per-axis node/weight arrays for a rule.
inline void axis_nodes(const QuadratureRule& rule, std::size_t axis,
                       std::vector<double>& x, std::vector<double>& w) {
    const double R = rule.radius[axis];
    const std::size_t n = rule.nodes[axis];
    x.clear();
    w.clear();
    if (rule.scheme == QuadScheme::trapezoid_uniform) {
        Grid1D g{-R, R, n};
        const double h = g.step();
        x.reserve(n);
        w.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(g.node(i));
            w.push_back((i == 0 || i == n - 1) ? 0.5 * h : h);
        }
    } else {
        const auto& gl = gauss16();
        const std::size_t panels = (n + 15) / 16;
        const double pw = 2.0 * R / static_cast<double>(panels);
        x.reserve(panels * 16);
        w.reserve(panels * 16);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = -R + pw * static_cast<double>(p);
            const double mid = a + 0.5 * pw;
            for (int k = 0; k < 16; ++k) {
                x.push_back(mid + 0.5 * pw * gl[0][k]);
                w.push_back(0.5 * pw * gl[1][k]);
            }
        }
    }
}

} // namespace detail

// Integrands may advertise a separable product structure so tensor-product
// quadrature can cache per-axis factors instead of re-evaluating them at
// every node of the product grid.
template <class F>
concept SeparableIntegrand = requires(const F f, std::size_t a, double t) {
    { f.axis_factor(a, t) } -> std::convertible_to<double>;
    { f.coupled_factor(t) } -> std::convertible_to<double>;
    { f.coupling_term(a, t) } -> std::convertible_to<double>;
    { f.coupling_offset() } -> std::convertible_to<double>;
};

// Deterministic approximation of the integral of g over the truncated box.
// Fixed ascending-index compensated summation; identical output for
// identical inputs regardless of thread count.
template <class F>
double integrate_nd(F&& g, const QuadratureRule& rule) {
    rule.validate();
    const std::size_t dims = rule.radius.size();
    std::vector<std::vector<double>> xs(dims), ws(dims);
    for (std::size_t a = 0; a < dims; ++a) detail::axis_nodes(rule, a, xs[a], ws[a]);

    std::vector<std::size_t> extents(dims);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dims; ++a) {
        extents[a] = xs[a].size();
        total *= extents[a];
    }

    std::vector<double> point(dims);
    std::vector<std::size_t> idx(dims, 0);
    KahanSum acc;

    if constexpr (SeparableIntegrand<std::decay_t<F>>) {
        // cache axis factors and coupling terms; only the coupled factor
        // varies per node
        std::vector<std::vector<double>> fax(dims), cterm(dims);
        for (std::size_t a = 0; a < dims; ++a) {
            fax[a].resize(extents[a]);
            cterm[a].resize(extents[a]);
            for (std::size_t i = 0; i < extents[a]; ++i) {
                fax[a][i] = g.axis_factor(a, xs[a][i]) * ws[a][i];
                cterm[a][i] = g.coupling_term(a, xs[a][i]);
            }
        }
        for (std::size_t k = 0; k < total; ++k) {
            double wprod = 1.0;
            double arg = g.coupling_offset();
            std::size_t rem = k;
            for (std::size_t a = dims; a-- > 0;) {
                const std::size_t i = rem % extents[a];
                rem /= extents[a];
                wprod *= fax[a][i];
                arg += cterm[a][i];
            }
            if (wprod == 0.0) continue;
            const double v = wprod * g.coupled_factor(arg);
            if (!std::isfinite(v))
                throw error("integrate_nd: non-finite sample at flat node " + std::to_string(k));
            acc.add(v);
        }
        return acc.value();
    } else {
        for (std::size_t k = 0; k < total; ++k) {
            double wprod = 1.0;
            std::size_t rem = k;
            for (std::size_t a = dims; a-- > 0;) {
                const std::size_t i = rem % extents[a];
                rem /= extents[a];
                point[a] = xs[a][i];
                wprod *= ws[a][i];
            }
            const double v = g(std::span<const double>(point));
            if (!std::isfinite(v)) {
                std::string where;
                for (double p : point) where += " " + std::to_string(p);
                throw error("integrate_nd: non-finite sample at node" + where);
            }
            acc.add(wprod * v);
        }
        return acc.value();
    }
}

// pv integral of g(u)/(y0 - u) du over the grid span, from samples of g on
// a uniform grid. The local linear interpolant through the pole-adjacent
// pair is integrated exactly against the kernel; the remainder is regular
// at the nodes and handled by the trapezoid rule. Exact for affine g.
inline double pv_integral(std::span<const double> g, const Grid1D& ug, double y0) {
    if (g.size() != ug.count) throw error("pv_integral: sample count does not match grid");
    const double h = ug.step();
    const double a = ug.min, b = ug.max;
    if (!(y0 > a && y0 < b))
        throw error("pv_integral: pole " + std::to_string(y0) + " outside grid span");
    if (y0 < a + 0.5 * h || y0 > b - 0.5 * h)
        throw error("pv_integral: pole within half a step of grid end");

    // chord through the pair straddling the pole; centered pair if the pole
    // sits on a node (keeps the odd-kernel cancellation exact for even g)
    const std::size_t last = ug.count - 1;
    std::size_t l = static_cast<std::size_t>((y0 - a) / h);
    if (l >= last) l = last - 1;
    const double d = y0 - ug.node(l);

    double value_at_pole, slope;
    const double node_snap = 1e-12 * h;
    std::size_t at_node = ug.count; // sentinel: pole not on a node
    if (d < node_snap || h - d < node_snap) {
        const std::size_t j = (d < node_snap) ? l : l + 1;
        // margin checks above guarantee 1 <= j <= last-1
        value_at_pole = g[j];
        slope = (g[j + 1] - g[j - 1]) / (2.0 * h);
        at_node = j;
    } else {
        slope = (g[l + 1] - g[l]) / h;
        value_at_pole = g[l] + slope * d;
    }

    const double analytic = value_at_pole * std::log((y0 - a) / (b - y0)) - slope * (b - a);

    KahanSum acc;
    for (std::size_t k = 0; k < ug.count; ++k) {
        if (k == at_node) continue;
        const double uk = ug.node(k);
        const double num = g[k] - (value_at_pole + slope * (uk - y0));
        double r = num / (y0 - uk);
        if (k == 0 || k == last) r *= 0.5;
        acc.add(r);
    }
    return analytic + h * acc.value();
}

} // namespace radonseis
