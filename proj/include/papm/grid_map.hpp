#pragma once

#include <cstddef>
#include <vector>

namespace papm {

/// Dense scalar field on a rows x cols pixel grid, stored row-major.
/// Pixel (i, j) has its center at (j + 0.5, i + 0.5) in the same frame as
/// point coordinates, so a point sitting at a pixel center has distance 0
/// to that pixel. Maps are nonnegative; gradient fields reuse the type and
/// may carry either sign.
struct GridMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    GridMap() = default;
    GridMap(int rows_, int cols_, double fill = 0.0)
        : rows(rows_), cols(cols_),
          values(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), fill) {}

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return values.size(); }
    bool same_shape(const GridMap& o) const { return rows == o.rows && cols == o.cols; }

    double total_mass() const;
    double max_value() const;
};

inline double pixel_center_x(int col) { return col + 0.5; }
inline double pixel_center_y(int row) { return row + 0.5; }

} // namespace papm
