#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radonseis/errors.hpp"
#include "radonseis/grid.hpp"

namespace radonseis {

enum class TransformKind { P, Q, R, XStandard };

inline const char* to_string(TransformKind k) {
    switch (k) {
        case TransformKind::P: return "P";
        case TransformKind::Q: return "Q";
        case TransformKind::R: return "R";
        case TransformKind::XStandard: return "X_standard";
    }
    return "?";
}

// Exponents, center and dimension of the transform family. All alpha_i and
// beta (when present) must exceed 1.
struct TransformParams {
    std::size_t n = 1;
    std::vector<double> alpha;
    std::optional<double> beta;
    std::vector<double> c;
};

struct VanishingOrders {
    std::vector<int> m;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

inline ValidationReport validate_params(const TransformParams& params,
                                        const VanishingOrders& orders) {
    ValidationReport rep;
    if (params.n < 1) rep.fail("n must be >= 1");
    if (params.alpha.size() != params.n) rep.fail("alpha must have n entries");
    if (params.c.size() != params.n) rep.fail("c must have n entries");
    if (orders.m.size() != params.n) rep.fail("m must have n entries");
    for (std::size_t i = 0; i < params.alpha.size(); ++i) {
        if (!(params.alpha[i] > 1.0))
            rep.fail("alpha[" + std::to_string(i) + "] must be > 1");
    }
    if (params.beta && !(*params.beta > 1.0)) rep.fail("beta must be > 1");
    for (std::size_t i = 0; i < orders.m.size(); ++i) {
        if (orders.m[i] < 0) rep.fail("m[" + std::to_string(i) + "] must be nonnegative");
        if (i < params.alpha.size() &&
            static_cast<double>(orders.m[i]) < params.alpha[i] - 2.0)
            rep.fail("m[" + std::to_string(i) + "] violates m_i >= alpha_i - 2 (" +
                     std::to_string(orders.m[i]) + " < " +
                     std::to_string(params.alpha[i] - 2.0) + ")");
    }
    return rep;
}

// Sampling of (s, u) in R^n x R.
struct SinogramGrid {
    std::vector<Grid1D> s_axes;
    Grid1D u_axis;

    void validate() const {
        if (s_axes.empty()) throw config_error("sinogram grid needs at least one s axis");
        for (const auto& g : s_axes) g.validate("s axis");
        u_axis.validate("u axis");
    }

    std::vector<std::size_t> extents() const {
        std::vector<std::size_t> e;
        e.reserve(s_axes.size() + 1);
        for (const auto& g : s_axes) e.push_back(g.count);
        e.push_back(u_axis.count);
        return e;
    }

    std::size_t cell_count() const {
        std::size_t total = u_axis.count;
        for (const auto& g : s_axes) total *= g.count;
        return total;
    }
};

// Sampled transform values, row-major over (s_1, ..., s_n, u). The u index
// is the fastest-varying one, so data for a fixed s node is contiguous.
struct Sinogram {
    TransformKind kind = TransformKind::P;
    TransformParams params;
    SinogramGrid grid;
    std::vector<double> values;
    int derivative_order = 0;
    std::map<std::string, std::string> meta;

    std::size_t s_cell_count() const { return values.size() / grid.u_axis.count; }

    const double* u_row(std::size_t s_flat) const {
        return values.data() + s_flat * grid.u_axis.count;
    }
    double* u_row(std::size_t s_flat) { return values.data() + s_flat * grid.u_axis.count; }

    void check_finite() const {
        for (std::size_t k = 0; k < values.size(); ++k)
            if (!std::isfinite(values[k]))
                throw error("sinogram contains non-finite value at flat index " +
                            std::to_string(k));
    }
};

// Sampled f(x, y) over an (x, y) grid, row-major over (x_1, ..., x_n, y).
struct Field {
    std::vector<Grid1D> x_axes;
    Grid1D y_axis;
    std::vector<double> values;
    std::map<std::string, std::string> meta;

    std::vector<std::size_t> extents() const {
        std::vector<std::size_t> e;
        e.reserve(x_axes.size() + 1);
        for (const auto& g : x_axes) e.push_back(g.count);
        e.push_back(y_axis.count);
        return e;
    }

    std::size_t point_count() const {
        std::size_t total = y_axis.count;
        for (const auto& g : x_axes) total *= g.count;
        return total;
    }
};

} // namespace radonseis
