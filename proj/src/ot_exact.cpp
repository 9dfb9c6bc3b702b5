#include "papm/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "papm/errors.hpp"

namespace papm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-14; // below this a supply/demand counts as spent

} // namespace

ExactSolution exact_ot(const CostMatrix& C, const std::vector<double>& source,
                       const std::vector<double>& target) {
    const std::size_t n = C.rows, m = C.cols;
    if (n == 0 || m == 0) throw std::invalid_argument("exact_ot: empty instance");
    if (n + m > 16) throw std::invalid_argument("exact_ot: instance too large (n + m must be <= 16)");
    if (C.entries.size() != n * m) throw std::invalid_argument("exact_ot: cost matrix size mismatch");
    if (source.size() != n || target.size() != m)
        throw std::invalid_argument("exact_ot: marginal length mismatch");

    double supply_sum = 0.0, demand_sum = 0.0;
    for (double v : source) {
        if (!(v >= 0.0)) throw std::invalid_argument("exact_ot: source weights must be >= 0");
        supply_sum += v;
    }
    for (double v : target) {
        if (!(v >= 0.0)) throw std::invalid_argument("exact_ot: target weights must be >= 0");
        demand_sum += v;
    }
    if (std::abs(supply_sum - demand_sum) > 1e-9 * std::max(1.0, supply_sum))
        throw std::invalid_argument("exact_ot: marginals must carry equal mass");

    std::vector<double> a = source; // remaining supply
    std::vector<double> b = target; // remaining demand
    std::vector<double> flow(n * m, 0.0);

    // Successive shortest-path augmentation. Nodes 0..n-1 are sources,
    // n..n+m-1 sinks; forward arcs i->j cost C_ij, residual arcs j->i cost
    // -C_ij while flow remains. With nonnegative costs the residual graph
    // never develops a negative cycle, so each augmentation along a
    // shortest path keeps the flow optimal for its mass. Shortest paths are
    // computed layer by layer over the path's edge count, so the
    // reconstructed path is simple even under floating-point cost ties.
    const std::size_t nodes = n + m;
    const std::size_t max_augments = 64 * nodes * nodes;
    std::size_t augments = 0;

    // dist[k][v]: cheapest path to v using at most k edges; parent per layer.
    std::vector<std::vector<double>> dist(nodes + 1, std::vector<double>(nodes, kInf));
    std::vector<std::vector<int>> prev(nodes + 1, std::vector<int>(nodes, -1));

    while (true) {
        double remaining = 0.0;
        for (double v : a) remaining += v;
        if (remaining <= kMassEps) break;
        if (++augments > max_augments)
            throw numeric_error("exact_ot: augmentation failed to terminate");

        for (auto& layer : dist) std::fill(layer.begin(), layer.end(), kInf);
        for (auto& layer : prev) std::fill(layer.begin(), layer.end(), -1);
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > kMassEps) dist[0][i] = 0.0;

        for (std::size_t k = 1; k <= nodes; ++k) {
            dist[k] = dist[k - 1];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const double c = C.entries[i * m + j];
                    if (dist[k - 1][i] < kInf && dist[k - 1][i] + c < dist[k][n + j]) {
                        dist[k][n + j] = dist[k - 1][i] + c;
                        prev[k][n + j] = static_cast<int>(i);
                    }
                    if (flow[i * m + j] > kMassEps && dist[k - 1][n + j] < kInf &&
                        dist[k - 1][n + j] - c < dist[k][i]) {
                        dist[k][i] = dist[k - 1][n + j] - c;
                        prev[k][i] = static_cast<int>(n + j);
                    }
                }
            }
        }

        std::size_t sink = m;
        double best = kInf;
        for (std::size_t j = 0; j < m; ++j) {
            if (b[j] > kMassEps && dist[nodes][n + j] < best) {
                best = dist[nodes][n + j];
                sink = j;
            }
        }
        if (sink == m) throw numeric_error("exact_ot: no augmenting path found");

        // Walk the layers back to a supplied source, collecting the path.
        std::vector<std::pair<int, int>> path; // (from, to) arcs, source side first
        int node = static_cast<int>(n + sink);
        std::size_t k = nodes;
        while (true) {
            while (k > 0 && prev[k][node] == -1 && dist[k - 1][node] == dist[k][node]) --k;
            if (k == 0 || prev[k][node] == -1) break;
            path.emplace_back(prev[k][node], node);
            node = prev[k][node];
            --k;
        }

        // Bottleneck: remaining demand, remaining supply at the root, and
        // every residual arc used backwards.
        double delta = std::min(b[sink], a[static_cast<std::size_t>(node)]);
        for (const auto& [from, to] : path) {
            if (from >= static_cast<int>(n)) // residual arc sink -> source
                delta = std::min(delta, flow[static_cast<std::size_t>(to) * m +
                                              (static_cast<std::size_t>(from) - n)]);
        }
        for (const auto& [from, to] : path) {
            if (from < static_cast<int>(n))
                flow[static_cast<std::size_t>(from) * m + (static_cast<std::size_t>(to) - n)] +=
                    delta;
            else
                flow[static_cast<std::size_t>(to) * m + (static_cast<std::size_t>(from) - n)] -=
                    delta;
        }
        a[static_cast<std::size_t>(node)] -= delta;
        b[sink] -= delta;
    }

    ExactSolution sol;
    sol.rows = n;
    sol.cols = m;
    sol.plan = std::move(flow);
    sol.value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) sol.value += C.entries[i * m + j] * sol.plan[i * m + j];
    return sol;
}

} // namespace papm
