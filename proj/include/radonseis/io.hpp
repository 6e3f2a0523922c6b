#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radonseis/errors.hpp"
#include "radonseis/inversion.hpp"
#include "radonseis/phantom.hpp"
#include "radonseis/quadrature.hpp"
#include "radonseis/seismic.hpp"
#include "radonseis/types.hpp"

#ifndef RADONSEIS_VERSION
#define RADONSEIS_VERSION "0.0.0-dev"
#endif

namespace radonseis {

using json = nlohmann::json;

inline const char* version_string() { return RADONSEIS_VERSION; }

inline TransformKind kind_from_string(const std::string& s) {
    if (s == "P") return TransformKind::P;
    if (s == "Q") return TransformKind::Q;
    if (s == "R") return TransformKind::R;
    if (s == "X_standard") return TransformKind::XStandard;
    throw config_error("unknown transform kind '" + s + "'");
}

inline FilterMethod filter_from_string(const std::string& s) {
    if (s == "finite_difference") return FilterMethod::finite_difference;
    if (s == "exact_dy") return FilterMethod::exact_dy;
    throw config_error("unknown filter method '" + s + "'");
}

inline json grid_to_json(const Grid1D& g) {
    return json{{"min", g.min}, {"max", g.max}, {"count", g.count}};
}

inline Grid1D grid_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("min") || !j.contains("max") || !j.contains("count"))
        throw config_error(where + ": grid needs min/max/count");
    Grid1D g{j.at("min").get<double>(), j.at("max").get<double>(),
             j.at("count").get<std::size_t>()};
    g.validate(where.c_str());
    return g;
}

struct ExperimentConfig {
    TransformKind kind = TransformKind::P;
    TransformParams params;
    VanishingOrders orders;
    std::vector<double> axis_widths;
    double y_width = 1.0;
    SinogramGrid sino_grid;
    std::vector<Grid1D> recon_x;
    Grid1D recon_y{-1.0, 1.0, 2};
    QuadratureRule rule;
    FilterMethod filter = FilterMethod::exact_dy;
    SweepOptions sweep;
    json raw; // the document as loaded, embedded in artifact metadata
};

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    try {
        if (j.value("schema", std::string()) != "radonseis/config/v1")
            throw config_error("config: schema must be radonseis/config/v1");
        cfg.kind = kind_from_string(j.at("kind").get<std::string>());
        cfg.params.n = j.at("n").get<std::size_t>();
        cfg.params.alpha = j.at("alpha").get<std::vector<double>>();
        if (j.contains("beta") && !j.at("beta").is_null())
            cfg.params.beta = j.at("beta").get<double>();
        cfg.params.c = j.at("c").get<std::vector<double>>();
        cfg.orders.m = j.at("m").get<std::vector<int>>();
        cfg.axis_widths = j.at("axis_widths").get<std::vector<double>>();
        cfg.y_width = j.at("y_width").get<double>();

        const json& sg = j.at("sinogram");
        for (std::size_t i = 0; i < sg.at("s").size(); ++i)
            cfg.sino_grid.s_axes.push_back(
                grid_from_json(sg.at("s").at(i), "sinogram.s[" + std::to_string(i) + "]"));
        cfg.sino_grid.u_axis = grid_from_json(sg.at("u"), "sinogram.u");
        cfg.sino_grid.validate();

        const json& rg = j.at("recon");
        for (std::size_t i = 0; i < rg.at("x").size(); ++i)
            cfg.recon_x.push_back(
                grid_from_json(rg.at("x").at(i), "recon.x[" + std::to_string(i) + "]"));
        cfg.recon_y = grid_from_json(rg.at("y"), "recon.y");

        const json& rl = j.at("rule");
        cfg.rule.radius = rl.at("radius").get<std::vector<double>>();
        cfg.rule.nodes = rl.at("nodes").get<std::vector<std::size_t>>();
        if (rl.value("scheme", std::string("trapezoid_uniform")) == "gauss_legendre_panels")
            cfg.rule.scheme = QuadScheme::gauss_legendre_panels;
        cfg.rule.validate();

        cfg.filter = filter_from_string(j.value("filter", std::string("exact_dy")));
        if (j.contains("sweep")) {
            const json& sw = j.at("sweep");
            cfg.sweep.nodes_per_feature =
                sw.value("nodes_per_feature", cfg.sweep.nodes_per_feature);
            cfg.sweep.max_axis_nodes = sw.value("max_axis_nodes", cfg.sweep.max_axis_nodes);
            cfg.sweep.table_step_fraction =
                sw.value("table_step_fraction", cfg.sweep.table_step_fraction);
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    auto rep = validate_params(cfg.params, cfg.orders);
    if (!rep.ok) {
        std::string msg = "config: invalid parameters:";
        for (const auto& v : rep.violations) msg += " [" + v + "]";
        throw config_error(msg);
    }
    if (cfg.axis_widths.size() != cfg.params.n || cfg.recon_x.size() != cfg.params.n ||
        cfg.sino_grid.s_axes.size() != cfg.params.n ||
        cfg.rule.radius.size() != cfg.params.n)
        throw config_error("config: per-axis arrays must all have n entries");
    return cfg;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("parse failure in '" + path + "': " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw error("cannot write '" + path + "'");
    out << j.dump(1) << "\n";
    if (!out) throw error("write failure on '" + path + "'");
}

inline Phantom phantom_from_config(const ExperimentConfig& cfg) {
    return make_phantom(cfg.params, cfg.orders, space_for(cfg.kind), cfg.axis_widths,
                        cfg.y_width);
}

namespace detail {

inline json meta_common(const TransformParams& params, const json& config,
                        const std::map<std::string, std::string>& extra) {
    json meta;
    meta["version"] = version_string();
    meta["n"] = params.n;
    meta["alpha"] = params.alpha;
    if (params.beta)
        meta["beta"] = *params.beta;
    else
        meta["beta"] = nullptr;
    meta["c"] = params.c;
    meta["extra"] = json::object();
    for (const auto& [k, v] : extra) meta["extra"][k] = v;
    if (!config.is_null()) meta["config"] = config;
    return meta;
}

inline void params_from_meta(const json& meta, TransformParams& params,
                             std::map<std::string, std::string>& extra) {
    params.n = meta.at("n").get<std::size_t>();
    params.alpha = meta.at("alpha").get<std::vector<double>>();
    if (meta.contains("beta") && !meta.at("beta").is_null())
        params.beta = meta.at("beta").get<double>();
    params.c = meta.at("c").get<std::vector<double>>();
    extra.clear();
    for (const auto& [k, v] : meta.at("extra").items()) extra[k] = v.get<std::string>();
}

} // namespace detail

inline json sinogram_to_json(const Sinogram& sino, const json& config = json()) {
    json j;
    j["schema"] = "radonseis/sinogram/v1";
    j["meta"] = detail::meta_common(sino.params, config, sino.meta);
    j["meta"]["kind"] = to_string(sino.kind);
    j["meta"]["derivative_order"] = sino.derivative_order;
    j["axes"] = json::array();
    for (std::size_t i = 0; i < sino.grid.s_axes.size(); ++i) {
        json a = grid_to_json(sino.grid.s_axes[i]);
        a["name"] = "s" + std::to_string(i);
        j["axes"].push_back(a);
    }
    json ua = grid_to_json(sino.grid.u_axis);
    ua["name"] = "u";
    j["axes"].push_back(ua);
    j["data"] = sino.values;
    return j;
}

inline Sinogram sinogram_from_json(const json& j) {
    if (j.value("schema", std::string()) != "radonseis/sinogram/v1")
        throw config_error("sinogram file: wrong schema");
    Sinogram s;
    try {
        const json& meta = j.at("meta");
        s.kind = kind_from_string(meta.at("kind").get<std::string>());
        s.derivative_order = meta.at("derivative_order").get<int>();
        detail::params_from_meta(meta, s.params, s.meta);
        const json& axes = j.at("axes");
        if (axes.size() < 2) throw config_error("sinogram file: need s and u axes");
        for (std::size_t i = 0; i + 1 < axes.size(); ++i)
            s.grid.s_axes.push_back(grid_from_json(axes.at(i), "axes"));
        s.grid.u_axis = grid_from_json(axes.back(), "axes.u");
        s.values = j.at("data").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw config_error(std::string("sinogram file: ") + e.what());
    }
    if (s.values.size() != s.grid.cell_count())
        throw config_error("sinogram file: data length does not match axes");
    return s;
}

inline json field_to_json(const Field& f, const TransformParams& params,
                          const json& config = json()) {
    json j;
    j["schema"] = "radonseis/field/v1";
    j["meta"] = detail::meta_common(params, config, f.meta);
    j["axes"] = json::array();
    for (std::size_t i = 0; i < f.x_axes.size(); ++i) {
        json a = grid_to_json(f.x_axes[i]);
        a["name"] = "x" + std::to_string(i);
        j["axes"].push_back(a);
    }
    json ya = grid_to_json(f.y_axis);
    ya["name"] = "y";
    j["axes"].push_back(ya);
    j["data"] = f.values;
    return j;
}

inline Field field_from_json(const json& j) {
    if (j.value("schema", std::string()) != "radonseis/field/v1")
        throw config_error("field file: wrong schema");
    Field f;
    try {
        TransformParams params;
        detail::params_from_meta(j.at("meta"), params, f.meta);
        const json& axes = j.at("axes");
        if (axes.size() < 2) throw config_error("field file: need x and y axes");
        for (std::size_t i = 0; i + 1 < axes.size(); ++i)
            f.x_axes.push_back(grid_from_json(axes.at(i), "axes"));
        f.y_axis = grid_from_json(axes.back(), "axes.y");
        f.values = j.at("data").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw config_error(std::string("field file: ") + e.what());
    }
    if (f.values.size() != f.point_count())
        throw config_error("field file: data length does not match axes");
    return f;
}

inline json phantom_to_json(const Phantom& ph, const json& config = json()) {
    json j;
    j["schema"] = "radonseis/phantom/v1";
    json meta = detail::meta_common(ph.params, config, {});
    meta["space"] = to_string(ph.space);
    meta["m"] = ph.orders.m;
    j["meta"] = meta;
    j["axes"] = json::array();
    j["data"] = json::array();
    for (const auto& p : ph.axis_profiles) {
        j["data"].push_back(p.exponent);
        j["data"].push_back(p.width);
    }
    j["data"].push_back(ph.y_profile.exponent);
    j["data"].push_back(ph.y_profile.width);
    return j;
}

inline json report_to_json(const RoundtripReport& rep, const json& config = json()) {
    json j;
    j["schema"] = "radonseis/report/v1";
    json meta;
    meta["version"] = version_string();
    for (const auto& [k, v] : rep.info) meta[k] = v;
    meta["columns"] = json::array({"rel_linf", "rel_l2", "max_abs_f", "mask_points",
                                   "clamped_lookups", "backprojection_lookups"});
    if (!config.is_null()) meta["config"] = config;
    j["meta"] = meta;
    j["axes"] = json::array();
    j["data"] = json::array({rep.rel_linf, rep.rel_l2, rep.max_abs_f,
                             static_cast<double>(rep.mask_points),
                             static_cast<double>(rep.clamped),
                             static_cast<double>(rep.lookups)});
    return j;
}

inline void sinogram_to_csv(const std::string& path, const Sinogram& sino) {
    std::ofstream out(path);
    if (!out) throw error("cannot write '" + path + "'");
    out.precision(17);
    const std::size_t n = sino.grid.s_axes.size();
    for (std::size_t i = 0; i < n; ++i) out << "s" << i << ",";
    out << "u,value\n";
    const auto ext = sino.grid.extents();
    for (std::size_t k = 0; k < sino.values.size(); ++k) {
        const auto idx = unflatten(k, ext);
        for (std::size_t i = 0; i < n; ++i) out << sino.grid.s_axes[i].node(idx[i]) << ",";
        out << sino.grid.u_axis.node(idx[n]) << "," << sino.values[k] << "\n";
    }
}

inline void field_to_csv(const std::string& path, const Field& f,
                         const Field* reference = nullptr) {
    std::ofstream out(path);
    if (!out) throw error("cannot write '" + path + "'");
    out.precision(17);
    const std::size_t n = f.x_axes.size();
    for (std::size_t i = 0; i < n; ++i) out << "x" << i << ",";
    out << "y,value";
    if (reference) out << ",reference,abs_error";
    out << "\n";
    const auto ext = f.extents();
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const auto idx = unflatten(k, ext);
        for (std::size_t i = 0; i < n; ++i) out << f.x_axes[i].node(idx[i]) << ",";
        out << f.y_axis.node(idx[n]) << "," << f.values[k];
        if (reference) {
            const double r = reference->values[k];
            out << "," << r << "," << std::abs(f.values[k] - r);
        }
        out << "\n";
    }
}

} // namespace radonseis
