#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "radonseis/chart.hpp"
#include "radonseis/inversion.hpp"
#include "radonseis/io.hpp"
#include "radonseis/seismic.hpp"

namespace radonseis {

struct PipelineOptions {
    std::string out_dir = ".";
    unsigned threads = 0; // 0: hardware concurrency
    std::uint64_t seed = 42;
    bool csv = false;
};

inline std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

namespace detail {

inline Phantom certified_phantom(const ExperimentConfig& cfg, std::uint64_t seed) {
    Phantom ph = phantom_from_config(cfg);
    auto rep = certify_membership(ph, seed);
    if (!rep.ok) {
        std::string msg = "phantom failed membership certification:";
        for (const auto& f : rep.failures) msg += " [" + f + "]";
        throw error(msg);
    }
    return ph;
}

} // namespace detail

// forward sweep for the configured phantom; metadata records the seed and
// grid provenance (never thread counts or timings, which would break the
// bit-identical-output contract)
inline Sinogram pipeline_forward(const ExperimentConfig& cfg, const PipelineOptions& opt) {
    Phantom ph = detail::certified_phantom(cfg, opt.seed);
    SweepOptions sweep = cfg.sweep;
    sweep.threads = opt.threads;
    Sinogram sino = forward_sinogram(ph, cfg.kind, cfg.sino_grid, cfg.rule, sweep);
    sino.meta["seed"] = std::to_string(opt.seed);
    return sino;
}

inline Sinogram pipeline_filter(const ExperimentConfig& cfg, const Sinogram& sino,
                                const PipelineOptions& opt) {
    Phantom ph = detail::certified_phantom(cfg, opt.seed);
    SweepOptions sweep = cfg.sweep;
    sweep.threads = opt.threads;
    Sinogram filt = du_n_filter(sino, cfg.filter, &ph, &cfg.rule, sweep);
    filt.meta["seed"] = std::to_string(opt.seed);
    return filt;
}

inline RoundtripReport pipeline_invert(const ExperimentConfig& cfg, const Sinogram& filtered,
                                       const PipelineOptions& opt) {
    Phantom ph = detail::certified_phantom(cfg, opt.seed);
    ReconRequest req;
    req.sino = &filtered;
    req.x_axes = cfg.recon_x;
    req.y_axis = cfg.recon_y;
    req.threads = opt.threads;

    RoundtripReport rep;
    rep.recon = invert_seismic(req);
    rep.reference = sample_phantom_field(ph, cfg.recon_x, cfg.recon_y);
    fill_roundtrip_errors(rep, 1e-3);
    rep.clamped = std::stoull(rep.recon.meta.at("clamped_lookups"));
    rep.lookups = std::stoull(rep.recon.meta.at("backprojection_lookups"));
    rep.info["filter_method"] = to_string(cfg.filter);
    rep.info["kind"] = to_string(cfg.kind);
    rep.info["seed"] = std::to_string(opt.seed);
    return rep;
}

inline void cmd_forward(const ExperimentConfig& cfg, const PipelineOptions& opt) {
    Sinogram sino = pipeline_forward(cfg, opt);
    write_json_file(join_path(opt.out_dir, "sinogram.json"), sinogram_to_json(sino, cfg.raw));
    if (opt.csv) sinogram_to_csv(join_path(opt.out_dir, "sinogram.csv"), sino);
}

inline void cmd_filter(const ExperimentConfig& cfg, const std::string& in_path,
                       const PipelineOptions& opt) {
    Sinogram sino = sinogram_from_json(read_json_file(in_path));
    Sinogram filt = pipeline_filter(cfg, sino, opt);
    write_json_file(join_path(opt.out_dir, "filtered_sinogram.json"),
                    sinogram_to_json(filt, cfg.raw));
    if (opt.csv) sinogram_to_csv(join_path(opt.out_dir, "filtered_sinogram.csv"), filt);
}

inline void cmd_invert(const ExperimentConfig& cfg, const std::string& in_path,
                       const PipelineOptions& opt) {
    Sinogram filt = sinogram_from_json(read_json_file(in_path));
    RoundtripReport rep = pipeline_invert(cfg, filt, opt);
    write_json_file(join_path(opt.out_dir, "field.json"),
                    field_to_json(rep.recon, cfg.params, cfg.raw));
    write_json_file(join_path(opt.out_dir, "report.json"), report_to_json(rep, cfg.raw));
    if (opt.csv) field_to_csv(join_path(opt.out_dir, "field.csv"), rep.recon, &rep.reference);
}

// the staged commands composed in memory; artifacts are bit-identical to
// running forward, filter, invert separately because every artifact
// round-trips exactly through its JSON form
inline RoundtripReport cmd_roundtrip(const ExperimentConfig& cfg, const PipelineOptions& opt) {
    Sinogram sino = pipeline_forward(cfg, opt);
    write_json_file(join_path(opt.out_dir, "sinogram.json"), sinogram_to_json(sino, cfg.raw));
    Sinogram filt = pipeline_filter(cfg, sino, opt);
    write_json_file(join_path(opt.out_dir, "filtered_sinogram.json"),
                    sinogram_to_json(filt, cfg.raw));
    RoundtripReport rep = pipeline_invert(cfg, filt, opt);
    write_json_file(join_path(opt.out_dir, "field.json"),
                    field_to_json(rep.recon, cfg.params, cfg.raw));
    write_json_file(join_path(opt.out_dir, "report.json"), report_to_json(rep, cfg.raw));
    if (opt.csv) {
        sinogram_to_csv(join_path(opt.out_dir, "sinogram.csv"), sino);
        sinogram_to_csv(join_path(opt.out_dir, "filtered_sinogram.csv"), filt);
        field_to_csv(join_path(opt.out_dir, "field.csv"), rep.recon, &rep.reference);
    }
    return rep;
}

// ---------------------------------------------------------------------
// Built-in analytic self tests. Each check has a closed-form target, so
// the suite certifies the numerical core without external data.
// ---------------------------------------------------------------------

inline bool cmd_selftest(std::ostream& os = std::cout, unsigned threads = 0) {
    bool ok = true;
    auto check = [&](const std::string& name, double got, double want, double tol) {
        const double dev = std::abs(got - want);
        const bool pass = dev <= tol;
        ok = ok && pass;
        os << (pass ? "PASS " : "FAIL ") << name << ": value " << got << ", target " << want
           << ", |dev| " << dev << ", tol " << tol << "\n";
    };
    (void)threads;

    // hemisphere measure through the chart, n = 1: integral of
    // (1+s^2)^{-1} over [-S, S] is 2*atan(S), tail to pi is below 2/S
    {
        const double S = 1000.0;
        Grid1D g{-S, S, 200001};
        KahanSum acc;
        for (std::size_t i = 0; i < g.count; ++i) {
            std::vector<double> s{g.node(i)};
            double v = chart_to_sphere(s).jacobian;
            if (i == 0 || i + 1 == g.count) v *= 0.5;
            acc.add(v);
        }
        const double got = acc.value() * g.step();
        check("chart measure n=1 (truncated)", got, 2.0 * std::atan(S), 1e-9);
        check("chart measure n=1 (tail vs pi)", got, M_PI, 2.0 / S);
    }

    // n = 2: integral of (1+|s|^2)^{-3/2} over the square [-S, S]^2 is
    // 2*pi - 4*atan(S^2 / sqrt(1 + 2 S^2))
    {
        const double S = 200.0;
        const std::size_t nn = 4001;
        Grid1D g{-S, S, nn};
        const double h = g.step();
        KahanSum acc;
        for (std::size_t i = 0; i < nn; ++i) {
            const double si = g.node(i);
            const double wi = (i == 0 || i + 1 == nn) ? 0.5 : 1.0;
            KahanSum row;
            for (std::size_t j = 0; j < nn; ++j) {
                const double sj = g.node(j);
                double v = std::pow(1.0 + si * si + sj * sj, -1.5);
                if (j == 0 || j + 1 == nn) v *= 0.5;
                row.add(v);
            }
            acc.add(wi * row.value());
        }
        const double got = acc.value() * h * h;
        const double truncated = 2.0 * M_PI - 4.0 * std::atan(S * S / std::sqrt(1.0 + 2.0 * S * S));
        check("chart measure n=2 (truncated)", got, truncated, 2e-3);
    }

    // pv engine analytic cases
    {
        Grid1D ug{-200.0, 200.0, 20001};
        std::vector<double> g(ug.count), aff(ug.count), even(ug.count);
        for (std::size_t i = 0; i < ug.count; ++i) {
            const double u = ug.node(i);
            g[i] = u / (1.0 + u * u);
            aff[i] = 3.0 - 0.25 * u;
            even[i] = std::exp(-u * u);
        }
        // pv of [u/(1+u^2)]/(0 - u) over [-S, S] is -2 atan(S)
        check("pv odd rational kernel", pv_integral(g, ug, 0.0),
              -2.0 * std::atan(200.0), 1e-6);
        // affine g: pv equals the exact log/linear expression, here at a
        // pole off the grid nodes
        const double y0 = 1.23456;
        const double exact = 3.0 - 0.25 * y0;
        const double want = exact * std::log((y0 - ug.min) / (ug.max - y0)) -
                            (-0.25) * (ug.max - ug.min);
        check("pv affine exactness", pv_integral(aff, ug, y0), want, 1e-9);
        check("pv even annihilation at center", pv_integral(even, ug, 0.0), 0.0, 1e-13);
    }

    // reduction identity spot check, n = 1, quadratic surface
    {
        TransformParams params{1, {2.0}, std::nullopt, {0.0}};
        VanishingOrders orders{{0}};
        Phantom ph = make_phantom(params, orders, PhantomSpace::S_cm_P,
                                  std::vector<double>{0.8}, 0.9);
        // exponent high enough that the derived integrand is smooth at 0
        ph.axis_profiles[0].exponent = 8;
        QuadratureRule fw = QuadratureRule::trapezoid({5.2}, {4001});
        QuadratureRule xi = QuadratureRule::trapezoid({28.0}, {40001});
        std::vector<std::pair<std::vector<double>, double>> pts;
        for (double s : {-1.5, -0.4, 0.0, 0.7, 1.2})
            pts.push_back({{s}, 0.3 * s - 0.5});
        auto rep = reduction_identity_check(ph, TransformKind::P, pts, fw, xi);
        check("reduction identity P n=1", rep.max_rel_dev, 0.0, 1e-6);
    }

    // odd integrands are annihilated by the even surface
    {
        TransformParams params{1, {2.0}, std::nullopt, {0.0}};
        auto odd = [](std::span<const double> x, double y) {
            return x[0] * std::exp(-x[0] * x[0] - y * y);
        };
        QuadratureRule fw = QuadratureRule::trapezoid({6.0}, {2001});
        double worst = 0.0;
        for (double s : {-1.0, 0.3, 2.0})
            for (double u : {-0.7, 0.0, 1.1})
                worst = std::max(worst, std::abs(forward_point(TransformKind::P, odd, params,
                                                               std::vector<double>{s}, u, fw)));
        check("odd-part annihilation", worst, 0.0, 1e-14);
    }

    os << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES present\n");
    return ok;
}

} // namespace radonseis
