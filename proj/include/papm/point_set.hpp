#pragma once

#include <cstddef>
#include <vector>

namespace papm {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Ground-truth annotations: continuous 2-D positions bound to an image
/// extent. Every point must lie strictly inside [0, width) x [0, height).
struct PointSet {
    int width = 0;
    int height = 0;
    std::vector<Point> points;

    std::size_t count() const { return points.size(); }
};

/// Throws io_error naming the offending field or point index.
void validate(const PointSet& ps);

} // namespace papm
