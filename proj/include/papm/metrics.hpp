#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"

namespace papm {

struct EvalRecord {
    double estimated = 0.0;
    double ground_truth = 0.0;
};

/// MAE = mean |e|, MSE = sqrt(mean e^2) (root form). Throws on empty input.
std::pair<double, double> mae_mse(std::span<const EvalRecord> records);

/// Count error over a 2^L x 2^L tiling with boundaries at floor(k * extent /
/// 2^L): sum over tiles of |tile mass - tile point count|. Level 0 equals
/// |total_mass - n| exactly. Requires both grid sides >= 2^L.
double game(const GridMap& pred, const PointSet& pts, int level);

struct MatchResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<Point> predicted;                  // peak pixel centers
    std::vector<std::pair<int, int>> matches;      // (predicted idx, gt idx)
};

/// Predicted points are strict 8-neighborhood local maxima with value >=
/// peak_threshold * max(pred); matching is greedy in ascending distance,
/// one-to-one, within match_radius. Undefined ratios are reported as 0.
MatchResult localize_and_match(const GridMap& pred, const PointSet& pts,
                               double peak_threshold, double match_radius);

} // namespace papm
