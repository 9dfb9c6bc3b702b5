#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"

namespace papm {

enum class PerturbMode {
    exact_radius, // displacement of length exactly `magnitude`, random angle
    uniform_disk, // uniform over the disk of that radius
};

struct PerturbSpec {
    double magnitude = 0.0;
    PerturbMode mode = PerturbMode::exact_radius;
    std::uint64_t seed = 0;
};

struct PerturbedPoints {
    PointSet points;
    std::size_t clamped = 0; // points pushed back inside the extent
};

/// Displaces every point independently. The displacement of point j depends
/// only on (seed, j), so reordering points never changes an individual draw.
PerturbedPoints perturb(const PointSet& pts, const PerturbSpec& spec);

struct SweepRow {
    double magnitude = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    std::size_t failures = 0; // fit failures in this row's cells
};

using FitProcedure = std::function<GridMap(const PointSet&)>;

/// For each magnitude and seed: perturb the annotations, run the fitting
/// procedure on the perturbed set, and score the fitted map against the
/// *clean* points with the GAME(game_level) count error (level 0 is the
/// plain |count - n|). Failures are counted per cell and excluded from the
/// averages; the sweep itself never aborts.
std::vector<SweepRow> robustness_sweep(const PointSet& clean,
                                       const FitProcedure& fit,
                                       std::span<const double> magnitudes,
                                       std::span<const std::uint64_t> seeds,
                                       int game_level);

} // namespace papm
