#pragma once

#include <cstddef>
#include <vector>

#include "papm/ggd.hpp"
#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"

namespace papm {

enum class CostFamily {
    ggd_l2_combination, // d^2 * exp((d^2 / 2 sigma^2)^(s/2))
    squared_euclidean,  // d^2
    power_ratio,        // (d / scale)^k
};

struct CostSpec {
    CostFamily family = CostFamily::ggd_l2_combination;
    GgdParams params{16.0, 2.0};  // ggd_l2_combination bandwidth/shape
    double power_scale = 16.0;    // power_ratio scale, pixels
    double power_exponent = 4.0;  // power_ratio exponent
    // The combination cost explodes a few sigma out; entries are clamped here
    // so log-domain solves stay finite. Clamp events are counted per matrix.
    double cost_cap = 1e12;
};

double cost(double distance, const CostSpec& spec);

/// Transport costs between annotation points (rows, file order) and pixel
/// centers (cols, row-major).
struct CostMatrix {
    std::size_t rows = 0; // n annotation points
    std::size_t cols = 0; // m pixels
    std::vector<double> entries;
    std::size_t clamped = 0; // entries saturated at cost_cap
    double max_entry = 0.0;

    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

CostMatrix build_cost_matrix(const PointSet& pts, int grid_rows, int grid_cols,
                             const CostSpec& spec);

} // namespace papm
