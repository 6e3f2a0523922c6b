#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "radonseis/errors.hpp"

namespace radonseis {

// Point of the upper hemisphere chart: s in R^n maps to the unit normal
// omega = (-s, 1)/sqrt(1+|s|^2) with omega_{n+1} > 0, and u maps to the
// plane offset t = u/sqrt(1+|s|^2).
struct ChartPoint {
    std::vector<double> s;
    double u = 0.0;
    std::vector<double> omega;
    double t = 0.0;
};

inline double chart_norm_sq(std::span<const double> s) {
    double q = 0.0;
    for (double v : s) q += v * v;
    return q;
}

struct ChartImage {
    std::vector<double> omega;
    double jacobian = 0.0; // d(omega)/ds
};

// s -> (omega, |d omega / ds|) with jacobian (1+|s|^2)^{-(n+1)/2}.
inline ChartImage chart_to_sphere(std::span<const double> s) {
    const std::size_t n = s.size();
    if (n == 0) throw config_error("chart_to_sphere: empty chart coordinate");
    const double q = 1.0 + chart_norm_sq(s);
    const double r = 1.0 / std::sqrt(q);
    ChartImage out;
    out.omega.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) out.omega[i] = -s[i] * r;
    out.omega[n] = r;
    out.jacobian = std::pow(q, -0.5 * static_cast<double>(n + 1));
    return out;
}

struct ChartImageT {
    std::vector<double> omega;
    double t = 0.0;
    double jacobian = 0.0; // d(omega, t)/d(s, u)
};

// (s, u) -> (omega, t, |d(omega,t)/d(s,u)|) with jacobian
// (1+|s|^2)^{-(n+2)/2}. Satisfies jacobian(s,u) = jacobian_domega(s)/sqrt(1+|s|^2).
inline ChartImageT chart_to_sphere_t(std::span<const double> s, double u) {
    ChartImage base = chart_to_sphere(s);
    ChartImageT out;
    out.omega = std::move(base.omega);
    const double r = out.omega.back(); // 1/sqrt(1+|s|^2)
    out.t = u * r;
    out.jacobian = base.jacobian * r;
    return out;
}

inline ChartPoint make_chart_point(std::vector<double> s, double u) {
    ChartPoint p;
    p.s = std::move(s);
    p.u = u;
    ChartImageT im = chart_to_sphere_t(p.s, u);
    p.omega = std::move(im.omega);
    p.t = im.t;
    return p;
}

} // namespace radonseis
