#pragma once

#include <cstdint>
#include <vector>

#include "papm/ggd.hpp"
#include "papm/grid_map.hpp"
#include "papm/loss.hpp"
#include "papm/ot.hpp"
#include "papm/point_set.hpp"

namespace papm {

enum class FitLoss { hd_l2, al_papm };
enum class FitInit { uniform_mass_n, seeded_random };

struct FitConfig {
    FitLoss loss = FitLoss::al_papm;
    int steps = 2000;
    // Subgradient descent on the L1 count term dithers the total mass by
    // ~4 * step_size * mass per step; 0.005 keeps the limit cycle inside the
    // trace-sanity band.
    double step_size = 0.005;
    FitInit init = FitInit::uniform_mass_n;
    std::uint64_t seed = 0; // seeded_random init only

    // The map is parameterized as the elementwise square of free parameters,
    // keeping it nonnegative without projections. The per-pixel loss
    // gradient is clipped to [-grad_clip, grad_clip] before the chain rule,
    // bounding every parameter's relative move per step; the combination
    // cost's duals span several orders of magnitude and would otherwise blow
    // past any fixed step. <= 0 disables.
    double grad_clip = 5.0;
    double divergence_factor = 1e3; // abort when loss exceeds this x initial

    KernelSpec kernel{};       // hd_l2 target
    CostSpec cost{};           // al_papm transport cost
    SinkhornConfig solver{};   // al_papm inner solver
    double lambda = 0.1;       // al_papm OT weight
};

struct FitResult {
    GridMap map;
    std::vector<double> trace; // loss before each step, plus the final loss
    bool diverged = false;
};

/// Fixed-step gradient descent of a free nonnegative map under the selected
/// loss. The transport problem is re-solved every step with warm-started
/// duals. Requires n >= 1.
FitResult fit_map(const PointSet& pts, int rows, int cols, const FitConfig& cfg);

} // namespace papm
