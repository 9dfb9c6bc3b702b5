#include "papm/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "papm/errors.hpp"

namespace papm {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

FitResult fit_map(const PointSet& pts, int rows, int cols, const FitConfig& cfg) {
    validate(pts);
    if (pts.count() == 0) throw std::invalid_argument("fit_map requires n >= 1");
    if (rows != pts.height || cols != pts.width)
        throw std::invalid_argument("fit_map: grid shape must match the annotation extent");
    if (cfg.steps < 1) throw std::invalid_argument("fit_map: steps must be >= 1");
    if (!(cfg.step_size > 0.0)) throw std::invalid_argument("fit_map: step_size must be > 0");
    if (cfg.loss == FitLoss::hd_l2 && cfg.kernel.stride != 1)
        throw std::invalid_argument("fit_map: hd_l2 target must use stride 1");

    const std::size_t m = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const double n = static_cast<double>(pts.count());

    // Map = u^2 elementwise; nonnegativity holds by construction.
    std::vector<double> u(m);
    if (cfg.init == FitInit::uniform_mass_n) {
        const double cell = std::sqrt(n / static_cast<double>(m));
        for (double& v : u) v = cell;
    } else {
        std::uint64_t state = cfg.seed;
        const double base = n / static_cast<double>(m);
        for (double& v : u) {
            const double x = base * (0.25 + 1.5 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53));
            v = std::sqrt(x);
        }
    }

    GridMap target;
    CostMatrix C;
    std::vector<double> source;
    TransportSolution warm;
    bool have_warm = false;
    if (cfg.loss == FitLoss::hd_l2) {
        target = generate_hd_papm(pts, cfg.kernel);
    } else {
        C = build_cost_matrix(pts, rows, cols, cfg.cost);
        source.assign(pts.count(), 1.0 / n);
    }

    FitResult result;
    result.map = GridMap(rows, cols);
    result.trace.reserve(cfg.steps + 1);
    GridMap pred(rows, cols);
    GridMap grad(rows, cols);
    double initial_loss = 0.0;

    for (int step = 0; step <= cfg.steps; ++step) {
        for (std::size_t k = 0; k < m; ++k) pred.values[k] = u[k] * u[k];

        double loss;
        if (cfg.loss == FitLoss::hd_l2) {
            L2Loss l2 = l2_loss(pred, target);
            loss = l2.value;
            grad = std::move(l2.grad);
        } else {
            SimilarityLoss sim = similarity_count_loss(pts, pred);
            loss = sim.value;
            grad = std::move(sim.grad);
            const double mass = pred.total_mass();
            if (mass > 0.0) {
                std::vector<double> tw(m);
                for (std::size_t k = 0; k < m; ++k) tw[k] = pred.values[k] / mass;
                const TransportSolution sol =
                    sinkhorn(C, source, tw, cfg.solver, have_warm ? &warm : nullptr);
                const GridMap og = ot_gradient(sol, pred);
                for (std::size_t k = 0; k < m; ++k) grad.values[k] += cfg.lambda * og.values[k];
                loss += cfg.lambda * sol.value;
                warm = sol;
                have_warm = true;
            }
        }

        result.trace.push_back(loss);
        if (step == 0) initial_loss = std::max(loss, 1e-12);
        if (!std::isfinite(loss) || loss > cfg.divergence_factor * initial_loss) {
            result.diverged = true;
            break;
        }
        if (step == cfg.steps) break;

        // Clip the map gradient before the chain rule: the combination
        // cost's duals reach 1e5+ on a 64x64 grid, and through du = -eta *
        // 2u * g the clip bounds the *relative* move of every parameter by
        // 2 * step_size * grad_clip per step.
        for (std::size_t k = 0; k < m; ++k) {
            double gk = grad.values[k];
            if (cfg.grad_clip > 0.0) {
                if (gk > cfg.grad_clip) gk = cfg.grad_clip;
                if (gk < -cfg.grad_clip) gk = -cfg.grad_clip;
            }
            u[k] -= cfg.step_size * 2.0 * u[k] * gk;
        }
    }

    for (std::size_t k = 0; k < m; ++k) result.map.values[k] = u[k] * u[k];
    return result;
}

} // namespace papm
