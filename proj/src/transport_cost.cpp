#include "papm/transport_cost.hpp"

#include <cmath>
#include <stdexcept>

#include "papm/parallel.hpp"

namespace papm {

namespace {

void check_spec(const CostSpec& spec) {
    switch (spec.family) {
        case CostFamily::ggd_l2_combination:
            if (!(spec.params.sigma > 0.0) || !(spec.params.shape_s > 0.0))
                throw std::invalid_argument("ggd_l2_combination needs sigma > 0 and shape_s > 0");
            break;
        case CostFamily::power_ratio:
            if (!(spec.power_scale > 0.0))
                throw std::invalid_argument("power_ratio needs scale > 0");
            if (!(spec.power_exponent > 0.0))
                throw std::invalid_argument("power_ratio needs exponent > 0");
            break;
        case CostFamily::squared_euclidean:
            break;
    }
    if (!(spec.cost_cap > 0.0)) throw std::invalid_argument("cost_cap must be > 0");
}

inline double cost_unchecked(double d, const CostSpec& spec) {
    switch (spec.family) {
        case CostFamily::squared_euclidean:
            return d * d;
        case CostFamily::power_ratio:
            return std::pow(d / spec.power_scale, spec.power_exponent);
        case CostFamily::ggd_l2_combination: {
            const double q = d * d / (2.0 * spec.params.sigma * spec.params.sigma);
            const double e = spec.params.shape_s == 2.0 ? q : std::pow(q, spec.params.shape_s / 2.0);
            if (e > 700.0) return spec.cost_cap; // exp would overflow
            const double c = d * d * std::exp(e);
            return c < spec.cost_cap ? c : spec.cost_cap;
        }
    }
    return 0.0;
}

} // namespace

double cost(double distance, const CostSpec& spec) {
    check_spec(spec);
    if (!(distance >= 0.0)) throw std::invalid_argument("distance must be >= 0");
    return cost_unchecked(distance, spec);
}

CostMatrix build_cost_matrix(const PointSet& pts, int grid_rows, int grid_cols,
                             const CostSpec& spec) {
    check_spec(spec);
    if (pts.count() == 0) throw std::invalid_argument("cost matrix needs n >= 1 points");
    if (grid_rows < 1 || grid_cols < 1)
        throw std::invalid_argument("cost matrix needs a non-empty grid");

    CostMatrix cm;
    cm.rows = pts.count();
    cm.cols = static_cast<std::size_t>(grid_rows) * static_cast<std::size_t>(grid_cols);
    cm.entries.resize(cm.rows * cm.cols);

    std::vector<std::size_t> clamped_per_row(cm.rows, 0);
    parallel_for(cm.rows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Point& p = pts.points[i];
            double* row = cm.entries.data() + i * cm.cols;
            std::size_t clamped = 0;
            for (int r = 0; r < grid_rows; ++r) {
                const double dy = pixel_center_y(r) - p.y;
                for (int c = 0; c < grid_cols; ++c) {
                    const double dx = pixel_center_x(c) - p.x;
                    const double d = std::sqrt(dx * dx + dy * dy);
                    const double v = cost_unchecked(d, spec);
                    if (v >= spec.cost_cap) ++clamped;
                    row[static_cast<std::size_t>(r) * grid_cols + c] = v;
                }
            }
            clamped_per_row[i] = clamped;
        }
    });
    for (std::size_t i = 0; i < cm.rows; ++i) cm.clamped += clamped_per_row[i];
    cm.max_entry = 0.0;
    for (double v : cm.entries) cm.max_entry = std::max(cm.max_entry, v);
    return cm;
}

} // namespace papm
