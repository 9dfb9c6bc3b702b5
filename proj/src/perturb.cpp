#include "papm/perturb.hpp"

#include <cmath>
#include <stdexcept>

#include "papm/metrics.hpp"

namespace papm {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double to_unit(std::uint64_t z) {
    return static_cast<double>(z >> 11) * 0x1.0p-53; // [0, 1)
}

} // namespace

PerturbedPoints perturb(const PointSet& pts, const PerturbSpec& spec) {
    validate(pts);
    if (!(spec.magnitude >= 0.0) || !std::isfinite(spec.magnitude))
        throw std::invalid_argument("perturb magnitude must be finite and >= 0");

    PerturbedPoints out;
    out.points.width = pts.width;
    out.points.height = pts.height;
    out.points.points.reserve(pts.count());

    const double x_hi = std::nextafter(static_cast<double>(pts.width), 0.0);
    const double y_hi = std::nextafter(static_cast<double>(pts.height), 0.0);

    for (std::size_t j = 0; j < pts.count(); ++j) {
        // Per-point sub-stream keyed on (seed, index): reordering the list
        // never changes an individual displacement.
        std::uint64_t state = spec.seed ^ (0xD1B54A32D192ED03ull * (j + 1));
        const double angle = 2.0 * M_PI * to_unit(splitmix64(state));
        double radius = spec.magnitude;
        if (spec.mode == PerturbMode::uniform_disk)
            radius = spec.magnitude * std::sqrt(to_unit(splitmix64(state)));

        double x = pts.points[j].x + radius * std::cos(angle);
        double y = pts.points[j].y + radius * std::sin(angle);
        bool clamped = false;
        if (x < 0.0) { x = 0.0; clamped = true; }
        if (x > x_hi) { x = x_hi; clamped = true; }
        if (y < 0.0) { y = 0.0; clamped = true; }
        if (y > y_hi) { y = y_hi; clamped = true; }
        if (clamped) ++out.clamped;
        out.points.points.push_back({x, y});
    }
    return out;
}

std::vector<SweepRow> robustness_sweep(const PointSet& clean, const FitProcedure& fit,
                                       std::span<const double> magnitudes,
                                       std::span<const std::uint64_t> seeds, int game_level) {
    if (magnitudes.empty()) throw std::invalid_argument("sweep needs at least one magnitude");
    if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
    validate(clean);

    std::vector<SweepRow> table;
    table.reserve(magnitudes.size());
    for (double magnitude : magnitudes) {
        SweepRow row;
        row.magnitude = magnitude;
        double abs_sum = 0.0, sq_sum = 0.0;
        std::size_t ok = 0;
        for (std::uint64_t seed : seeds) {
            const PerturbedPoints noisy =
                perturb(clean, {magnitude, PerturbMode::exact_radius, seed});
            try {
                const GridMap fitted = fit(noisy.points);
                const double err = game(fitted, clean, game_level);
                abs_sum += err;
                sq_sum += err * err;
                ++ok;
            } catch (const std::exception&) {
                ++row.failures;
            }
        }
        if (ok > 0) {
            row.mae = abs_sum / static_cast<double>(ok);
            row.mse = std::sqrt(sq_sum / static_cast<double>(ok));
        } else {
            row.mae = std::numeric_limits<double>::quiet_NaN();
            row.mse = std::numeric_limits<double>::quiet_NaN();
        }
        table.push_back(row);
    }
    return table;
}

} // namespace papm
