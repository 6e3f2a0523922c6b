#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "radonseis/errors.hpp"

namespace radonseis {

// Uniform 1-D grid, endpoints included. node(i) = min + i*step in one
// multiply-add; node(count-1) hits max to within rounding.
struct Grid1D {
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;

    double step() const { return (max - min) / static_cast<double>(count - 1); }
    double node(std::size_t i) const { return min + static_cast<double>(i) * step(); }

    // Index of the nearest node; caller must ensure x is within span.
    std::size_t nearest(double x) const {
        double t = (x - min) / step();
        if (t < 0.0) t = 0.0;
        auto i = static_cast<std::size_t>(std::lround(t));
        return i >= count ? count - 1 : i;
    }

    bool contains(double x) const { return x >= min && x <= max; }

    void validate(const char* what) const {
        if (!(min < max)) throw config_error(std::string(what) + ": grid requires min < max");
        if (count < 2) throw config_error(std::string(what) + ": grid requires count >= 2");
    }
};

// Row-major flattening of a multi-index over per-axis extents.
inline std::size_t flatten(const std::vector<std::size_t>& idx,
                           const std::vector<std::size_t>& extents) {
    std::size_t k = 0;
    for (std::size_t a = 0; a < extents.size(); ++a) k = k * extents[a] + idx[a];
    return k;
}

inline std::vector<std::size_t> unflatten(std::size_t k, const std::vector<std::size_t>& extents) {
    std::vector<std::size_t> idx(extents.size());
    for (std::size_t a = extents.size(); a-- > 0;) {
        idx[a] = k % extents[a];
        k /= extents[a];
    }
    return idx;
}

} // namespace radonseis
