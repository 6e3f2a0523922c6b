#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "radonseis/errors.hpp"
#include "radonseis/parallel.hpp"
#include "radonseis/phantom.hpp"
#include "radonseis/seismic.hpp"
#include "radonseis/standard_radon.hpp"
#include "radonseis/types.hpp"

namespace radonseis {

// Constant multiplying the backprojection integral for each transform
// kind and dimension. P and R share constants (4(-1)^{(n-1)/2}/(4pi)^{n+1}
// odd, (-1)^{n/2}/(4pi)^n even); Q carries the 2pi versions.
inline double inversion_constant(TransformKind kind, std::size_t n) {
    if (kind == TransformKind::Q || kind == TransformKind::XStandard)
        return chart_inversion_constant(n);
    if (n % 2 == 1) {
        const double sign = (((n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
        return 4.0 * sign / detail::ipow(4.0 * M_PI, n + 1);
    }
    const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign / detail::ipow(4.0 * M_PI, n);
}

struct ReconRequest {
    const Sinogram* sino = nullptr;
    std::vector<Grid1D> x_axes;
    Grid1D y_axis;
    BackprojectOptions options{true, 0.2}; // zero-extension with clamp accounting
    unsigned threads = 0;                  // 0: hardware concurrency
};

namespace detail {

// surface pairing in the backprojection argument: P and R use
// s_i |x_i - c_i|^{alpha_i}, Q the signed power
inline double backproj_surf(TransformKind kind, double d, double alpha) {
    const double a = std::abs(d);
    if (a == 0.0) return 0.0;
    const double p = std::pow(a, alpha);
    return (kind == TransformKind::Q && d < 0.0) ? -p : p;
}

} // namespace detail

// Filtered backprojection for the seismic transforms. The prefactor
// prod alpha_i |x_i - c_i|^{alpha_i - 1} (times |y| for R) multiplies the
// backprojected integral; points on the axes x_i = c_i (and y = 0 for R)
// come out exactly 0.
inline Field invert_seismic(const ReconRequest& req) {
    if (req.sino == nullptr) throw config_error("invert_seismic: no sinogram");
    const Sinogram& sino = *req.sino;
    const TransformKind kind = sino.kind;
    if (kind == TransformKind::XStandard)
        throw config_error("invert_seismic: use invert_radon_chart for the standard kind");
    const TransformParams& params = sino.params;
    const std::size_t n = params.n;
    if (req.x_axes.size() != n)
        throw config_error("invert_seismic: reconstruction grid dimension mismatch");
    if (sino.derivative_order != static_cast<int>(n))
        throw error("invert_seismic: sinogram derivative order " +
                    std::to_string(sino.derivative_order) + ", need " + std::to_string(n));
    if (kind == TransformKind::R && !params.beta)
        throw config_error("invert_seismic: kind R requires beta");

    Field out;
    out.x_axes = req.x_axes;
    out.y_axis = req.y_axis;
    for (const auto& g : out.x_axes) g.validate("recon x axis");
    out.y_axis.validate("recon y axis");
    out.values.assign(out.point_count(), 0.0);

    const double C = inversion_constant(kind, n);
    const double beta = params.beta.value_or(2.0);
    const auto ext = out.extents();
    const std::size_t total = out.point_count();
    const unsigned threads = req.threads == 0 ? default_thread_count() : req.threads;

    // the clamp budget applies to the reconstruction as a whole: corner
    // points may legitimately clamp a large share of their own lookups
    // while the data mass there is negligible
    BackprojectOptions per_point = req.options;
    per_point.max_clamp_fraction = 1.0;

    std::vector<ClampStats> stats(total);
    parallel_for(0, total, threads, [&](std::size_t k) {
        const auto idx = unflatten(k, ext);
        std::vector<double> surf(n);
        double pre = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = out.x_axes[i].node(idx[i]) - params.c[i];
            pre *= params.alpha[i] * std::pow(std::abs(d), params.alpha[i] - 1.0);
            surf[i] = detail::backproj_surf(kind, d, params.alpha[i]);
        }
        const double y = out.y_axis.node(idx[n]);
        double yterm = y;
        if (kind == TransformKind::R) {
            pre *= std::abs(y);
            yterm = std::pow(std::abs(y), beta);
        }
        if (pre == 0.0) return; // exact zero from the prefactor
        auto pole = [&](std::span<const double> s) {
            double p = yterm;
            for (std::size_t i = 0; i < n; ++i) p -= s[i] * surf[i];
            return p;
        };
        out.values[k] = pre * C * backproject_chart(sino, pole, per_point, &stats[k]);
    });

    // weight every reconstruction point equally: supersampled points run
    // more lookups, and raw counts would over-weight exactly the corner
    // points that clamp the most
    std::size_t clamped = 0, cells = 0, used = 0;
    double frac_sum = 0.0;
    for (const auto& st : stats) {
        clamped += st.clamped;
        cells += st.cells;
        if (st.cells > 0) {
            frac_sum += static_cast<double>(st.clamped) / static_cast<double>(st.cells);
            ++used;
        }
    }
    if (used > 0 && frac_sum > req.options.max_clamp_fraction * static_cast<double>(used))
        throw error("invert_seismic: " + std::to_string(clamped) + " of " +
                    std::to_string(cells) + " backprojection lookups clamped, over the limit");
    out.meta["clamped_lookups"] = std::to_string(clamped);
    out.meta["backprojection_lookups"] = std::to_string(cells);
    return out;
}

inline Field invert_P(const ReconRequest& req) {
    if (req.sino == nullptr || req.sino->kind != TransformKind::P)
        throw config_error("invert_P: sinogram kind must be P");
    return invert_seismic(req);
}

inline Field invert_Q(const ReconRequest& req) {
    if (req.sino == nullptr || req.sino->kind != TransformKind::Q)
        throw config_error("invert_Q: sinogram kind must be Q");
    return invert_seismic(req);
}

inline Field invert_R(const ReconRequest& req) {
    if (req.sino == nullptr || req.sino->kind != TransformKind::R)
        throw config_error("invert_R: sinogram kind must be R");
    return invert_seismic(req);
}

struct RoundtripConfig {
    Phantom phantom;
    TransformKind kind = TransformKind::P;
    SinogramGrid sino_grid;
    QuadratureRule rule;
    FilterMethod filter = FilterMethod::exact_dy;
    std::vector<Grid1D> recon_x;
    Grid1D recon_y;
    BackprojectOptions options{true, 0.2};
    SweepOptions sweep;
    unsigned threads = 0;
    double mask_fraction = 1e-3; // |f| >= fraction * max|f| defines the error mask
};

struct RoundtripReport {
    Field recon;
    Field reference;
    // relative errors normalized by max |f| over the grid (L-inf) and by
    // ||f||_2 over the mask (L2), restricted to the mask
    double rel_linf = 0.0;
    double rel_l2 = 0.0;
    double max_abs_f = 0.0;
    std::size_t mask_points = 0;
    std::size_t clamped = 0;
    std::size_t lookups = 0;
    std::map<std::string, std::string> info;
};

// phantom sampled on a reconstruction grid, as the comparison reference
inline Field sample_phantom_field(const Phantom& ph, const std::vector<Grid1D>& x_axes,
                                  const Grid1D& y_axis) {
    Field f;
    f.x_axes = x_axes;
    f.y_axis = y_axis;
    f.values.assign(f.point_count(), 0.0);
    const auto ext = f.extents();
    const std::size_t n = ph.params.n;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const auto idx = unflatten(k, ext);
        for (std::size_t i = 0; i < n; ++i) x[i] = x_axes[i].node(idx[i]);
        f.values[k] = ph.eval(x, y_axis.node(idx[n]));
    }
    return f;
}

// fill error figures of a report whose recon and reference are set
inline void fill_roundtrip_errors(RoundtripReport& rep, double mask_fraction) {
    rep.max_abs_f = 0.0;
    for (double v : rep.reference.values) rep.max_abs_f = std::max(rep.max_abs_f, std::abs(v));
    const double mask = mask_fraction * rep.max_abs_f;
    double linf = 0.0;
    KahanSum num2, den2;
    rep.mask_points = 0;
    for (std::size_t k = 0; k < rep.reference.values.size(); ++k) {
        const double fv = rep.reference.values[k];
        if (std::abs(fv) < mask) continue;
        ++rep.mask_points;
        const double d = rep.recon.values[k] - fv;
        linf = std::max(linf, std::abs(d));
        num2.add(d * d);
        den2.add(fv * fv);
    }
    rep.rel_linf = rep.max_abs_f > 0.0 ? linf / rep.max_abs_f : 0.0;
    rep.rel_l2 = den2.value() > 0.0 ? std::sqrt(num2.value() / den2.value()) : 0.0;
    rep.info["mask_fraction"] = std::to_string(mask_fraction);
}

// forward sweep -> u-derivative filter -> filtered backprojection, with
// errors measured against direct phantom evaluation.
inline RoundtripReport roundtrip_report(const RoundtripConfig& cfg) {
    require_certified(cfg.phantom, cfg.kind);
    SweepOptions sweep = cfg.sweep;
    if (sweep.threads == 0) sweep.threads = cfg.threads;

    Sinogram sino = forward_sinogram(cfg.phantom, cfg.kind, cfg.sino_grid, cfg.rule, sweep);
    Sinogram filt = du_n_filter(sino, cfg.filter, &cfg.phantom, &cfg.rule, sweep);

    ReconRequest req;
    req.sino = &filt;
    req.x_axes = cfg.recon_x;
    req.y_axis = cfg.recon_y;
    req.options = cfg.options;
    req.threads = cfg.threads;

    RoundtripReport rep;
    rep.recon = invert_seismic(req);
    rep.reference = sample_phantom_field(cfg.phantom, cfg.recon_x, cfg.recon_y);
    fill_roundtrip_errors(rep, cfg.mask_fraction);

    rep.clamped = std::stoull(rep.recon.meta.at("clamped_lookups"));
    rep.lookups = std::stoull(rep.recon.meta.at("backprojection_lookups"));
    rep.info["filter_method"] = to_string(cfg.filter);
    rep.info["kind"] = to_string(cfg.kind);
    rep.info["truncation_radius"] = sino.meta.count("truncation_radius")
                                        ? sino.meta.at("truncation_radius")
                                        : std::string();
    return rep;
}

} // namespace radonseis
