#include "papm/point_set.hpp"

#include <cmath>
#include <string>

#include "papm/errors.hpp"

namespace papm {

void validate(const PointSet& ps) {
    if (ps.width <= 0)
        throw io_error("image_width must be positive, got " + std::to_string(ps.width));
    if (ps.height <= 0)
        throw io_error("image_height must be positive, got " + std::to_string(ps.height));
    for (std::size_t i = 0; i < ps.points.size(); ++i) {
        const Point& p = ps.points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw io_error("point " + std::to_string(i) + " has a non-finite coordinate");
        if (p.x < 0.0 || p.x >= ps.width || p.y < 0.0 || p.y >= ps.height)
            throw io_error("point " + std::to_string(i) + " (" + std::to_string(p.x) + ", " +
                           std::to_string(p.y) + ") lies outside the image extent " +
                           std::to_string(ps.width) + "x" + std::to_string(ps.height));
    }
}

} // namespace papm
