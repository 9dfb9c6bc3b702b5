#pragma once

#include <cstddef>
#include <functional>

namespace papm {

/// Thread cap from PAPM_THREADS (0 = sequential, the default). Read once.
int thread_budget();

/// Runs body(begin, end) over a partition of [0, n). Workers own disjoint
/// ranges, so results are bit-stable as long as the body only writes inside
/// its range.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace papm
