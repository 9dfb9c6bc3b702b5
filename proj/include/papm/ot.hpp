#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"
#include "papm/transport_cost.hpp"

namespace papm {

struct SinkhornConfig {
    // Entropic regularization. Interpreted relative to median(C) unless
    // epsilon_is_absolute; the default 0.01 * median(C) keeps the solve
    // scale-free across cost families.
    double epsilon = 0.01;
    bool epsilon_is_absolute = false;
    int max_iters = 500;        // total budget across schedule levels
    double marginal_tol = 1e-6; // L1 violation over both marginals
    // Geometric epsilon schedule: start at max(C), multiply by this factor
    // once the current level has converged, and finish at epsilon. 1 disables
    // the schedule.
    double epsilon_decay = 1.0;
};

struct TransportSolution {
    std::size_t rows = 0; // n
    std::size_t cols = 0; // m
    // Row-major n x m coupling, entries >= 0. The entropic iterate is
    // rounded onto the marginal polytope before it is returned, so
    // marginal_violation reports the (near-zero) residual of this plan;
    // `converged` tells whether the dual iterate met marginal_tol.
    std::vector<double> plan;
    double value = 0.0;             // <C, T>
    double value_regularized = 0.0; // <C, T> + eps * sum T (log T - 1)
    std::vector<double> dual_source; // length n
    // Length m. Zero-mass columns carry the soft c-transform
    // -eps * lse_i((f_i - C_ij)/eps) so downstream gradients stay finite.
    std::vector<double> dual_target;
    int iterations_used = 0;
    double marginal_violation = 0.0;
    bool converged = false;
    double epsilon_used = 0.0;

    double plan_at(std::size_t i, std::size_t j) const { return plan[i * cols + j]; }
};

/// source = uniform 1/n over annotation atoms, target = pred / total_mass.
/// Throws invalid_argument("degenerate measure...") when n = 0 or the map
/// has zero mass.
std::pair<std::vector<double>, std::vector<double>>
normalize_measures(const PointSet& pts, const GridMap& pred);

/// Log-domain Sinkhorn for the balanced entropic OT problem. Deterministic
/// for fixed inputs and config; on non-convergence returns the best iterate
/// with converged = false. warm, when given, seeds the dual potentials.
TransportSolution sinkhorn(const CostMatrix& C,
                           const std::vector<double>& source,
                           const std::vector<double>& target,
                           const SinkhornConfig& cfg,
                           const TransportSolution* warm = nullptr);

struct ExactSolution {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> plan;
    double value = 0.0;

    double plan_at(std::size_t i, std::size_t j) const { return plan[i * cols + j]; }
};

/// Exact optimum of the linear transportation problem via successive
/// shortest-path augmentation on the bipartite instance. Small instances
/// only: requires n + m <= 16.
ExactSolution exact_ot(const CostMatrix& C,
                       const std::vector<double>& source,
                       const std::vector<double>& target);

/// Envelope gradient of the OT value with respect to the unnormalized pixel
/// values: g_j = beta_j / |A| - <beta, A> / |A|^2 with beta = dual_target.
GridMap ot_gradient(const TransportSolution& sol, const GridMap& pred);

} // namespace papm
