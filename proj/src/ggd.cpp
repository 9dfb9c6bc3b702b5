#include "papm/ggd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "papm/parallel.hpp"
#include "papm/point_set.hpp"

namespace papm {

namespace {

void check_params(const GgdParams& p) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(p.shape_s > 0.0)) throw std::invalid_argument("shape_s must be > 0");
}

inline double kernel_from_d2(double d2, const GgdParams& p) {
    const double q = d2 / (2.0 * p.sigma * p.sigma);
    if (p.shape_s == 2.0) return std::exp(-q); // Gaussian case, kept exact
    return std::exp(-std::pow(q, p.shape_s / 2.0));
}

} // namespace

double kernel_value(double distance, const GgdParams& p) {
    check_params(p);
    if (!(distance >= 0.0)) throw std::invalid_argument("distance must be >= 0");
    return kernel_from_d2(distance * distance, p);
}

double truncation_radius(const GgdParams& p, double tau) {
    check_params(p);
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("truncation_tau must be in (0, 1)");
    return p.sigma * std::sqrt(2.0) * std::pow(std::log(1.0 / tau), 1.0 / p.shape_s);
}

double analytic_normalization(const GgdParams& p) {
    check_params(p);
    const double s = p.shape_s;
    return s / (M_PI * p.sigma * p.sigma * std::tgamma(1.0 / s) * std::pow(2.0, 1.0 / s));
}

GridMap generate_hd_papm(const PointSet& pts, const KernelSpec& spec) {
    validate(pts);
    check_params(spec.params);
    if (spec.stride < 1) throw std::invalid_argument("stride must be >= 1");
    const int st = spec.stride;
    const int out_rows = (pts.height + st - 1) / st;
    const int out_cols = (pts.width + st - 1) / st;
    if (out_rows <= 0 || out_cols <= 0) throw std::invalid_argument("zero-size grid");

    const double r = truncation_radius(spec.params, spec.truncation_tau);
    const double r2 = r * r;
    const double analytic_k = analytic_normalization(spec.params);

    struct Footprint {
        int i_min, i_max, j_min, j_max;
        double x, y;
        double scale;
        bool collapsed; // no strided center inside the truncation radius
        int fi, fj;     // nearest center, used when collapsed
    };
    std::vector<Footprint> fps(pts.count());

    // Per-point truncated box and normalization; points are independent here.
    parallel_for(pts.count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const Point& p = pts.points[k];
            Footprint fp{};
            fp.x = p.x;
            fp.y = p.y;
            fp.j_min = std::max(0, (int)std::ceil((p.x - r) / st - 0.5));
            fp.j_max = std::min(out_cols - 1, (int)std::floor((p.x + r) / st - 0.5));
            fp.i_min = std::max(0, (int)std::ceil((p.y - r) / st - 0.5));
            fp.i_max = std::min(out_rows - 1, (int)std::floor((p.y + r) / st - 0.5));

            double sum = 0.0;
            for (int i = fp.i_min; i <= fp.i_max; ++i) {
                const double dy = (i + 0.5) * st - p.y;
                for (int j = fp.j_min; j <= fp.j_max; ++j) {
                    const double dx = (j + 0.5) * st - p.x;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 <= r2) sum += kernel_from_d2(d2, spec.params);
                }
            }
            fp.collapsed = (sum == 0.0);
            if (fp.collapsed) {
                // Truncation radius smaller than half a pixel: the kernel
                // degenerates to a dot on the nearest center.
                fp.fj = std::clamp((int)std::floor(p.x / st), 0, out_cols - 1);
                fp.fi = std::clamp((int)std::floor(p.y / st), 0, out_rows - 1);
                fp.scale = spec.normalization == KernelNorm::discrete_renormalized
                               ? 1.0
                               : analytic_k;
            } else {
                fp.scale = spec.normalization == KernelNorm::discrete_renormalized
                               ? 1.0 / sum
                               : analytic_k;
            }
            fps[k] = fp;
        }
    });

    GridMap map(out_rows, out_cols);
    // Each pixel accumulates over points in file order, so the result is
    // bit-stable for any thread partition of the rows.
    parallel_for(static_cast<std::size_t>(out_rows), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int ii = static_cast<int>(i);
            for (std::size_t k = 0; k < fps.size(); ++k) {
                const Footprint& fp = fps[k];
                if (fp.collapsed) {
                    if (fp.fi == ii) map.at(ii, fp.fj) += fp.scale;
                    continue;
                }
                if (ii < fp.i_min || ii > fp.i_max) continue;
                const double dy = (ii + 0.5) * st - fp.y;
                for (int j = fp.j_min; j <= fp.j_max; ++j) {
                    const double dx = (j + 0.5) * st - fp.x;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 <= r2) map.at(ii, j) += fp.scale * kernel_from_d2(d2, spec.params);
                }
            }
        }
    });
    return map;
}

L2Loss l2_loss(const GridMap& pred, const GridMap& target) {
    if (!pred.same_shape(target))
        throw std::invalid_argument("l2_loss: shape mismatch between pred and target");
    L2Loss out;
    out.grad = GridMap(pred.rows, pred.cols);
    double value = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred.values[i] - target.values[i];
        value += 0.5 * diff * diff;
        out.grad.values[i] = diff;
    }
    out.value = value;
    return out;
}

} // namespace papm
