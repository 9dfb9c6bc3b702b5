#include "papm/grid_map.hpp"

#include <algorithm>

namespace papm {

double GridMap::total_mass() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
}

double GridMap::max_value() const {
    if (values.empty()) return 0.0;
    return *std::max_element(values.begin(), values.end());
}

} // namespace papm
