#pragma once

#include <cstddef>

#include "papm/grid_map.hpp"
#include "papm/ot.hpp"
#include "papm/point_set.hpp"
#include "papm/transport_cost.hpp"

namespace papm {

/// Unit mass per annotation dropped into its containing pixel
/// (floor of coordinates).
GridMap rasterize_points(const PointSet& pts, int rows, int cols);

struct SimilarityLoss {
    double value = 0.0;
    GridMap grad;
};

/// l_S(P, A) = | n - |A| | + n * || P/n - A/|A| ||_1 with P rasterized onto
/// the grid. Degenerate cases: n = 0 gives |A|; zero-mass A gives 2n.
/// Subgradients at L1 kinks are fixed to 0.
SimilarityLoss similarity_count_loss(const PointSet& pts, const GridMap& pred);

struct SolverDiagnostics {
    int iterations = 0;
    double marginal_violation = 0.0;
    bool converged = true;
    double epsilon = 0.0;
    std::size_t clamped_costs = 0;
    bool degenerate = false; // OT term skipped (n = 0 or zero-mass map)
};

struct LossBreakdown {
    double ot_term = 0.0;         // <C, T> on normalized measures
    double similarity_term = 0.0;
    double total = 0.0;           // lambda * ot_term + similarity_term
    double lambda = 0.0;
    GridMap grad;                 // d total / d pred (regularized OT route)
    SolverDiagnostics diagnostics;
};

/// Combined objective lambda * l_C + l_S with gradient w.r.t. the predicted
/// map. Never fails on degenerate inputs: with n = 0 or a zero-mass map the
/// OT term is skipped and reported as 0.
LossBreakdown al_papm_loss(const PointSet& pts, const GridMap& pred,
                           const CostSpec& cost_spec, const SinkhornConfig& cfg,
                           double lambda);

} // namespace papm
