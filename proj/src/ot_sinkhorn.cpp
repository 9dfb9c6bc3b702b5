#include "papm/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "papm/errors.hpp"

namespace papm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

void check_simplex(const std::vector<double>& w, const char* name) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw std::invalid_argument(std::string(name) + " weights must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument(std::string(name) + " weights must sum to 1");
    if (sum <= 0.0) throw std::invalid_argument(std::string(name) + " measure has zero mass");
}

} // namespace

std::pair<std::vector<double>, std::vector<double>>
normalize_measures(const PointSet& pts, const GridMap& pred) {
    if (pts.count() == 0)
        throw std::invalid_argument("degenerate measure: empty point set");
    const double mass = pred.total_mass();
    if (!(mass > 0.0))
        throw std::invalid_argument("degenerate measure: predicted map has zero mass");
    std::vector<double> source(pts.count(), 1.0 / static_cast<double>(pts.count()));
    std::vector<double> target(pred.values.size());
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = pred.values[i] / mass;
    return {std::move(source), std::move(target)};
}

TransportSolution sinkhorn(const CostMatrix& C, const std::vector<double>& source,
                           const std::vector<double>& target, const SinkhornConfig& cfg,
                           const TransportSolution* warm) {
    const std::size_t n = C.rows, m = C.cols;
    if (n == 0 || m == 0) throw std::invalid_argument("sinkhorn: empty instance");
    if (C.entries.size() != n * m) throw std::invalid_argument("sinkhorn: cost matrix size mismatch");
    if (source.size() != n || target.size() != m)
        throw std::invalid_argument("sinkhorn: marginal length mismatch");
    check_simplex(source, "source");
    check_simplex(target, "target");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(cfg.marginal_tol > 0.0)) throw std::invalid_argument("marginal_tol must be > 0");
    if (!(cfg.epsilon_decay > 0.0 && cfg.epsilon_decay <= 1.0))
        throw std::invalid_argument("epsilon_decay must be in (0, 1]");
    for (double c : C.entries)
        if (!std::isfinite(c)) throw std::invalid_argument("sinkhorn: cost matrix must be finite");

    const double* cost = C.entries.data();
    double cmax = 0.0;
    for (double c : C.entries) cmax = std::max(cmax, c);

    TransportSolution sol;
    sol.rows = n;
    sol.cols = m;

    // All costs zero: the entropic optimum is the product coupling.
    if (cmax == 0.0) {
        sol.plan.resize(n * m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) sol.plan[i * m + j] = source[i] * target[j];
        sol.value = 0.0;
        sol.dual_source.assign(n, 0.0);
        sol.dual_target.assign(m, 0.0);
        sol.converged = true;
        sol.epsilon_used = cfg.epsilon_is_absolute ? cfg.epsilon : cfg.epsilon;
        double reg = 0.0;
        for (double t : sol.plan)
            if (t > 0.0) reg += t * (std::log(t) - 1.0);
        sol.value_regularized = sol.epsilon_used * reg;
        return sol;
    }

    double eps_target = cfg.epsilon;
    if (!cfg.epsilon_is_absolute) {
        const double med = median_of(C.entries);
        eps_target = cfg.epsilon * (med > 0.0 ? med : cmax);
    }

    std::vector<double> logmu(n), lognu(m);
    for (std::size_t i = 0; i < n; ++i) logmu[i] = source[i] > 0.0 ? std::log(source[i]) : kNegInf;
    for (std::size_t j = 0; j < m; ++j) lognu[j] = target[j] > 0.0 ? std::log(target[j]) : kNegInf;

    std::vector<double> f(n, 0.0), g(m, 0.0);
    if (warm && warm->dual_source.size() == n && warm->dual_target.size() == m) {
        f = warm->dual_source;
        g = warm->dual_target;
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(f[i])) f[i] = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (!std::isfinite(g[j])) g[j] = 0.0;
    }
    // Dead columns/rows never attract mass.
    for (std::size_t i = 0; i < n; ++i)
        if (logmu[i] == kNegInf) f[i] = kNegInf;
    for (std::size_t j = 0; j < m; ++j)
        if (lognu[j] == kNegInf) g[j] = kNegInf;

    double eps = (cfg.epsilon_decay < 1.0) ? std::max(cmax, eps_target) : eps_target;
    double inv_eps = 1.0 / eps;

    std::vector<double> rowsum(n), colsum(m);
    auto marginal_violation = [&]() {
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (f[i] == kNegInf) continue;
            const double* ci = cost + i * m;
            double rs = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (g[j] == kNegInf) continue;
                const double t = std::exp((f[i] + g[j] - ci[j]) * inv_eps);
                rs += t;
                colsum[j] += t;
            }
            rowsum[i] = rs;
        }
        double viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) viol += std::abs(rowsum[i] - source[i]);
        for (std::size_t j = 0; j < m; ++j) viol += std::abs(colsum[j] - target[j]);
        return viol;
    };

    int iters = 0;
    bool converged = false;
    double viol = std::numeric_limits<double>::infinity();
    // Looser targets on warm-up levels of the epsilon schedule; the final
    // level must meet cfg.marginal_tol.
    const double warmup_tol = std::max(cfg.marginal_tol, 1e-3);

    while (iters < cfg.max_iters) {
        ++iters;
        // f_i = eps log mu_i - eps lse_j((g_j - C_ij)/eps)
        for (std::size_t i = 0; i < n; ++i) {
            if (logmu[i] == kNegInf) continue;
            const double* ci = cost + i * m;
            double mx = kNegInf;
            for (std::size_t j = 0; j < m; ++j) {
                if (g[j] == kNegInf) continue;
                mx = std::max(mx, g[j] - ci[j]);
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (g[j] == kNegInf) continue;
                acc += std::exp((g[j] - ci[j] - mx) * inv_eps);
            }
            f[i] = eps * logmu[i] - (mx + eps * std::log(acc));
        }
        // g_j = eps log nu_j - eps lse_i((f_i - C_ij)/eps)
        for (std::size_t j = 0; j < m; ++j) {
            if (lognu[j] == kNegInf) continue;
            double mx = kNegInf;
            for (std::size_t i = 0; i < n; ++i) {
                if (f[i] == kNegInf) continue;
                mx = std::max(mx, f[i] - cost[i * m + j]);
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (f[i] == kNegInf) continue;
                acc += std::exp((f[i] - cost[i * m + j] - mx) * inv_eps);
            }
            g[j] = eps * lognu[j] - (mx + eps * std::log(acc));
        }

        viol = marginal_violation();
        const bool final_level = (eps == eps_target);
        if (final_level && viol <= cfg.marginal_tol) {
            converged = true;
            break;
        }
        if (!final_level && viol <= warmup_tol) {
            eps = std::max(eps_target, eps * cfg.epsilon_decay);
            inv_eps = 1.0 / eps;
        }
    }

    sol.iterations_used = iters;
    sol.converged = converged;
    sol.epsilon_used = eps;

    sol.plan.assign(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] == kNegInf) continue;
        const double* ci = cost + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            if (g[j] == kNegInf) continue;
            sol.plan[i * m + j] = std::exp((f[i] + g[j] - ci[j]) * inv_eps);
        }
    }

    // Round the iterate onto the coupling polytope: scale rows and columns
    // down to their marginals, then patch the leftover mass with a rank-one
    // term. Moves the value by at most max(C) times the iterate's violation.
    {
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) rowsum[i] += sol.plan[i * m + j];
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = rowsum[i] > source[i] && rowsum[i] > 0.0 ? source[i] / rowsum[i] : 1.0;
            if (scale != 1.0)
                for (std::size_t j = 0; j < m; ++j) sol.plan[i * m + j] *= scale;
        }
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) colsum[j] += sol.plan[i * m + j];
        for (std::size_t j = 0; j < m; ++j) {
            const double scale = colsum[j] > target[j] && colsum[j] > 0.0 ? target[j] / colsum[j] : 1.0;
            if (scale != 1.0)
                for (std::size_t i = 0; i < n; ++i) sol.plan[i * m + j] *= scale;
        }
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                rowsum[i] += sol.plan[i * m + j];
                colsum[j] += sol.plan[i * m + j];
            }
        double deficit = 0.0;
        for (std::size_t i = 0; i < n; ++i) deficit += std::max(0.0, source[i] - rowsum[i]);
        if (deficit > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double ri = std::max(0.0, source[i] - rowsum[i]);
                if (ri == 0.0) continue;
                for (std::size_t j = 0; j < m; ++j) {
                    const double cj = std::max(0.0, target[j] - colsum[j]);
                    if (cj > 0.0) sol.plan[i * m + j] += ri * cj / deficit;
                }
            }
        }
    }

    double value = 0.0, reg = 0.0, plan_viol = 0.0;
    std::fill(rowsum.begin(), rowsum.end(), 0.0);
    std::fill(colsum.begin(), colsum.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ci = cost + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = sol.plan[i * m + j];
            if (t > 0.0) {
                value += ci[j] * t;
                reg += t * (std::log(t) - 1.0);
                rowsum[i] += t;
                colsum[j] += t;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) plan_viol += std::abs(rowsum[i] - source[i]);
    for (std::size_t j = 0; j < m; ++j) plan_viol += std::abs(colsum[j] - target[j]);
    sol.marginal_violation = plan_viol;
    sol.value = value;
    sol.value_regularized = value + eps * reg;

    // Finite dual completion: dead rows/columns get the soft c-transform of
    // the opposite potential, the marginal price of adding mass there.
    sol.dual_source = f;
    sol.dual_target = g;
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] != kNegInf) continue;
        const double* ci = cost + i * m;
        double mx = kNegInf;
        for (std::size_t j = 0; j < m; ++j)
            if (g[j] != kNegInf) mx = std::max(mx, g[j] - ci[j]);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (g[j] != kNegInf) acc += std::exp((g[j] - ci[j] - mx) * inv_eps);
        sol.dual_source[i] = -(mx + eps * std::log(acc));
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (g[j] != kNegInf) continue;
        double mx = kNegInf;
        for (std::size_t i = 0; i < n; ++i)
            if (f[i] != kNegInf) mx = std::max(mx, f[i] - cost[i * m + j]);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (f[i] != kNegInf) acc += std::exp((f[i] - cost[i * m + j] - mx) * inv_eps);
        sol.dual_target[j] = -(mx + eps * std::log(acc));
    }
    return sol;
}

GridMap ot_gradient(const TransportSolution& sol, const GridMap& pred) {
    if (sol.cols != pred.size())
        throw std::invalid_argument("ot_gradient: solution/map size mismatch");
    const double mass = pred.total_mass();
    if (!(mass > 0.0)) throw std::invalid_argument("ot_gradient: zero-mass map");

    double dot = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) dot += sol.dual_target[j] * pred.values[j];

    GridMap grad(pred.rows, pred.cols);
    const double inv_mass = 1.0 / mass;
    const double shift = dot * inv_mass * inv_mass;
    for (std::size_t j = 0; j < pred.size(); ++j)
        grad.values[j] = sol.dual_target[j] * inv_mass - shift;
    return grad;
}

} // namespace papm
