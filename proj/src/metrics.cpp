#include "papm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace papm {

std::pair<double, double> mae_mse(std::span<const EvalRecord> records) {
    if (records.empty()) throw std::invalid_argument("mae_mse: empty record list");
    double abs_sum = 0.0, sq_sum = 0.0;
    for (const EvalRecord& r : records) {
        const double e = std::abs(r.estimated - r.ground_truth);
        abs_sum += e;
        sq_sum += e * e;
    }
    const double inv_n = 1.0 / static_cast<double>(records.size());
    return {abs_sum * inv_n, std::sqrt(sq_sum * inv_n)};
}

namespace {

// Tile of index i under boundaries floor(k * extent / tiles); every level-L
// boundary is also a level-(L+1) boundary, so refinements nest.
inline int tile_of(int i, int extent, int tiles) {
    return static_cast<int>((static_cast<long long>(i + 1) * tiles - 1) / extent);
}

} // namespace

double game(const GridMap& pred, const PointSet& pts, int level) {
    if (level < 0) throw std::invalid_argument("game: level must be >= 0");
    if (pred.rows != pts.height || pred.cols != pts.width)
        throw std::invalid_argument("game: grid and point set extents disagree");
    const int tiles = 1 << level;
    if (pred.rows < tiles || pred.cols < tiles)
        throw std::invalid_argument("game: grid smaller than 2^L per side");

    std::vector<double> mass(static_cast<std::size_t>(tiles) * tiles, 0.0);
    std::vector<double> count(static_cast<std::size_t>(tiles) * tiles, 0.0);
    for (int r = 0; r < pred.rows; ++r) {
        const int tr = tile_of(r, pred.rows, tiles);
        for (int c = 0; c < pred.cols; ++c) {
            const int tc = tile_of(c, pred.cols, tiles);
            mass[static_cast<std::size_t>(tr) * tiles + tc] += pred.at(r, c);
        }
    }
    for (const Point& p : pts.points) {
        const int tr = tile_of(static_cast<int>(std::floor(p.y)), pred.rows, tiles);
        const int tc = tile_of(static_cast<int>(std::floor(p.x)), pred.cols, tiles);
        count[static_cast<std::size_t>(tr) * tiles + tc] += 1.0;
    }
    double err = 0.0;
    for (std::size_t t = 0; t < mass.size(); ++t) err += std::abs(mass[t] - count[t]);
    return err;
}

MatchResult localize_and_match(const GridMap& pred, const PointSet& pts,
                               double peak_threshold, double match_radius) {
    if (!(peak_threshold > 0.0 && peak_threshold < 1.0))
        throw std::invalid_argument("peak_threshold must be in (0, 1)");
    if (!(match_radius >= 0.0)) throw std::invalid_argument("match_radius must be >= 0");

    MatchResult res;
    const double peak = pred.max_value();
    if (peak > 0.0) {
        const double cut = peak_threshold * peak;
        for (int r = 0; r < pred.rows; ++r) {
            for (int c = 0; c < pred.cols; ++c) {
                const double v = pred.at(r, c);
                if (v < cut) continue;
                bool strict_max = true;
                for (int dr = -1; dr <= 1 && strict_max; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int rr = r + dr, cc = c + dc;
                        if (rr < 0 || rr >= pred.rows || cc < 0 || cc >= pred.cols) continue;
                        if (pred.at(rr, cc) >= v) {
                            strict_max = false;
                            break;
                        }
                    }
                }
                if (strict_max) res.predicted.push_back({pixel_center_x(c), pixel_center_y(r)});
            }
        }
    }

    // Greedy one-to-one matching in ascending distance; ties break on the
    // (predicted, ground-truth) index pair so results are deterministic.
    std::vector<std::tuple<double, int, int>> pairs;
    for (std::size_t pi = 0; pi < res.predicted.size(); ++pi) {
        for (std::size_t gi = 0; gi < pts.count(); ++gi) {
            const double dx = res.predicted[pi].x - pts.points[gi].x;
            const double dy = res.predicted[pi].y - pts.points[gi].y;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d <= match_radius)
                pairs.emplace_back(d, static_cast<int>(pi), static_cast<int>(gi));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> pred_used(res.predicted.size(), false), gt_used(pts.count(), false);
    for (const auto& [d, pi, gi] : pairs) {
        (void)d;
        if (pred_used[pi] || gt_used[gi]) continue;
        pred_used[pi] = true;
        gt_used[gi] = true;
        res.matches.emplace_back(pi, gi);
    }

    const double matched = static_cast<double>(res.matches.size());
    res.precision = res.predicted.empty() ? 0.0 : matched / static_cast<double>(res.predicted.size());
    res.recall = pts.count() == 0 ? 0.0 : matched / static_cast<double>(pts.count());
    res.f1 = (res.precision + res.recall) > 0.0
                 ? 2.0 * res.precision * res.recall / (res.precision + res.recall)
                 : 0.0;
    return res;
}

} // namespace papm
