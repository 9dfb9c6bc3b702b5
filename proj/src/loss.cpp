#include "papm/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "papm/errors.hpp"

namespace papm {

namespace {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

GridMap rasterize_points(const PointSet& pts, int rows, int cols) {
    validate(pts);
    if (rows < 1 || cols < 1) throw std::invalid_argument("rasterize_points: empty grid");
    GridMap map(rows, cols);
    for (const Point& p : pts.points) {
        // Containing cell; coordinates are rescaled when the grid extent
        // differs from the annotation extent.
        int c = static_cast<int>(std::floor(p.x * cols / pts.width));
        int r = static_cast<int>(std::floor(p.y * rows / pts.height));
        c = std::min(c, cols - 1);
        r = std::min(r, rows - 1);
        map.at(r, c) += 1.0;
    }
    return map;
}

SimilarityLoss similarity_count_loss(const PointSet& pts, const GridMap& pred) {
    const double n = static_cast<double>(pts.count());
    const double mass = pred.total_mass();

    SimilarityLoss out;
    out.grad = GridMap(pred.rows, pred.cols);

    if (pts.count() == 0) {
        out.value = mass;
        const double d = sgn(mass); // 0 at the all-zero map
        for (double& gv : out.grad.values) gv = d;
        return out;
    }

    const double count_term = std::abs(n - mass);
    const double dcount = sgn(mass - n);

    if (!(mass > 0.0)) {
        // Zero-mass map: the normalized shape gap is the full unit of mass.
        out.value = count_term + n;
        for (double& gv : out.grad.values) gv = dcount;
        return out;
    }

    const GridMap raster = rasterize_points(pts, pred.rows, pred.cols);
    double l1 = 0.0, sign_dot = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double nu = pred.values[k] / mass;
        const double mu = raster.values[k] / n;
        l1 += std::abs(nu - mu);
        sign_dot += sgn(nu - mu) * nu;
    }
    out.value = count_term + n * l1;
    const double scale = n / mass;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double nu = pred.values[k] / mass;
        const double mu = raster.values[k] / n;
        out.grad.values[k] = dcount + scale * (sgn(nu - mu) - sign_dot);
    }
    return out;
}

LossBreakdown al_papm_loss(const PointSet& pts, const GridMap& pred,
                           const CostSpec& cost_spec, const SinkhornConfig& cfg,
                           double lambda) {
    if (pred.rows < 1 || pred.cols < 1) throw std::invalid_argument("al_papm_loss: empty grid");
    for (double v : pred.values)
        if (!(v >= 0.0)) throw std::invalid_argument("al_papm_loss: pred must be nonnegative");

    LossBreakdown out;
    out.lambda = lambda;

    const SimilarityLoss sim = similarity_count_loss(pts, pred);
    out.similarity_term = sim.value;
    out.grad = sim.grad;

    const double mass = pred.total_mass();
    if (pts.count() == 0 || !(mass > 0.0)) {
        out.diagnostics.degenerate = true;
        out.ot_term = 0.0;
        out.total = lambda * out.ot_term + out.similarity_term;
        return out;
    }

    const CostMatrix C = build_cost_matrix(pts, pred.rows, pred.cols, cost_spec);
    auto [source, target] = normalize_measures(pts, pred);
    const TransportSolution sol = sinkhorn(C, source, target, cfg);
    out.ot_term = sol.value;
    const GridMap ot_grad = ot_gradient(sol, pred);
    for (std::size_t k = 0; k < pred.size(); ++k)
        out.grad.values[k] += lambda * ot_grad.values[k];

    out.diagnostics.iterations = sol.iterations_used;
    out.diagnostics.marginal_violation = sol.marginal_violation;
    out.diagnostics.converged = sol.converged;
    out.diagnostics.epsilon = sol.epsilon_used;
    out.diagnostics.clamped_costs = C.clamped;

    out.total = lambda * out.ot_term + out.similarity_term;
    return out;
}

} // namespace papm
