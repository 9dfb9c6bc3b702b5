#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "papm/ggd.hpp"

using namespace papm;

TEST_CASE("kernel is 1 at zero distance") {
    CHECK(kernel_value(0.0, {4.0, 8.0}) == 1.0);
    CHECK(kernel_value(0.0, {16.0, 2.0}) == 1.0);
    CHECK(kernel_value(0.0, {0.5, 0.7}) == 1.0);
}

TEST_CASE("kernel matches the closed form at reference points") {
    // sigma=4, s=2, d=4: the Gaussian exp(-0.5)
    CHECK(kernel_value(4.0, {4.0, 2.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    // sigma=4, s=8, d=4: exp(-(1/2)^4) = exp(-0.0625)
    CHECK(kernel_value(4.0, {4.0, 8.0}) == doctest::Approx(std::exp(-0.0625)).epsilon(1e-14));
}

TEST_CASE("s = 2 reduces to the Gaussian for random sigma and d") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(0.5, 32.0), ud(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double sigma = us(rng), d = ud(rng);
        const double expected = std::exp(-d * d / (2.0 * sigma * sigma));
        const double got = kernel_value(d, {sigma, 2.0});
        CHECK(std::abs(got - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("kernel is strictly decreasing in distance") {
    // Strict in exact arithmetic; in doubles the flat center of high-shape
    // kernels rounds to 1 and the tail underflows to 0, so strictness is
    // asserted between those plateaus.
    for (double s : {0.5, 1.0, 2.0, 8.0, 16.0}) {
        double prev = kernel_value(0.0, {4.0, s});
        for (double d = 0.5; d < 20.0 && prev > 0.0; d += 0.5) {
            const double v = kernel_value(d, {4.0, s});
            CHECK(v <= prev);
            if (prev < 1.0) CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("shape crossover: larger s is flatter inside sigma*sqrt(2), lower beyond") {
    const double sigma = 4.0;
    const double cross = sigma * std::sqrt(2.0);
    for (double d : {1.0, 3.0, cross - 0.5}) {
        CHECK(kernel_value(d, {sigma, 8.0}) > kernel_value(d, {sigma, 2.0}));
    }
    for (double d : {cross + 0.5, 8.0, 12.0}) {
        CHECK(kernel_value(d, {sigma, 8.0}) < kernel_value(d, {sigma, 2.0}));
    }
    // At the crossover every shape gives exp(-1).
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        CHECK(kernel_value(cross, {sigma, s}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
}

TEST_CASE("truncation radius closed form") {
    const GgdParams p{4.0, 8.0};
    const double r = truncation_radius(p, 1e-6);
    CHECK(r == doctest::Approx(4.0 * std::sqrt(2.0) * std::pow(std::log(1e6), 0.125)).epsilon(1e-14));
    CHECK(kernel_value(r, p) == doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("analytic normalization constant follows the documented formula") {
    // s=2: 2 / (pi sigma^2 Gamma(1/2) sqrt(2)) = sqrt(2) / (pi^(3/2) sigma^2)
    const double sigma = 3.0;
    const double expected = std::sqrt(2.0) / (std::pow(M_PI, 1.5) * sigma * sigma);
    CHECK(analytic_normalization({sigma, 2.0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("empty point set yields the all-zero map") {
    PointSet ps;
    ps.width = 16;
    ps.height = 12;
    const GridMap m = generate_hd_papm(ps, {});
    CHECK(m.rows == 12);
    CHECK(m.cols == 16);
    CHECK(m.total_mass() == 0.0);
}

TEST_CASE("single centered point: unit mass, peak at its pixel") {
    PointSet ps;
    ps.width = 9;
    ps.height = 9;
    ps.points = {{4.5, 4.5}};
    KernelSpec spec;
    spec.params = {4.0, 8.0};
    const GridMap m = generate_hd_papm(ps, spec);
    CHECK(std::abs(m.total_mass() - 1.0) < 1e-9);
    int best_r = -1, best_c = -1;
    double best = -1.0;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (m.at(r, c) > best) {
                best = m.at(r, c);
                best_r = r;
                best_c = c;
            }
    CHECK(best_r == 4);
    CHECK(best_c == 4);
}

TEST_CASE("far-apart points superpose exactly") {
    KernelSpec spec;
    spec.params = {2.0, 4.0};
    const double r = truncation_radius(spec.params, spec.truncation_tau);
    REQUIRE(2.0 * r < 30.0);

    PointSet both;
    both.width = 64;
    both.height = 16;
    both.points = {{10.0, 8.0}, {50.0, 8.0}};

    PointSet left = both, right = both;
    left.points = {both.points[0]};
    right.points = {both.points[1]};

    const GridMap mb = generate_hd_papm(both, spec);
    const GridMap ml = generate_hd_papm(left, spec);
    const GridMap mr = generate_hd_papm(right, spec);
    for (std::size_t i = 0; i < mb.size(); ++i)
        CHECK(mb.values[i] == ml.values[i] + mr.values[i]);
}

TEST_CASE("mass conservation holds for random point sets incl. borders") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(0.0, 32.0), uy(0.0, 24.0), uu(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        PointSet ps;
        ps.width = 32;
        ps.height = 24;
        const int n = 1 + static_cast<int>(uu(rng) * 12);
        for (int k = 0; k < n; ++k) {
            double x = ux(rng), y = uy(rng);
            if (k % 3 == 0) x = uu(rng) * 0.2;           // hug the left border
            if (k % 4 == 0) y = 24.0 - uu(rng) * 0.01;   // hug the bottom border
            ps.points.push_back({std::min(x, 31.999), std::min(y, 23.999)});
        }
        KernelSpec spec;
        spec.params = {1.0 + 7.0 * uu(rng), 0.5 + 15.0 * uu(rng)};
        const GridMap m = generate_hd_papm(ps, spec);
        CHECK(std::abs(m.total_mass() - n) < 1e-9 * n);
        for (double v : m.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("tightening the truncation threshold barely changes the map") {
    PointSet ps;
    ps.width = 32;
    ps.height = 32;
    ps.points = {{7.3, 9.1}, {20.0, 22.5}, {30.9, 2.2}};
    KernelSpec coarse, fine;
    coarse.params = fine.params = {4.0, 8.0};
    coarse.truncation_tau = 1e-6;
    fine.truncation_tau = 1e-9;
    const GridMap a = generate_hd_papm(ps, coarse);
    const GridMap b = generate_hd_papm(ps, fine);
    // Relative to the map scale: pixels cut by the coarser truncation hold
    // at most tau of a kernel peak.
    const double scale = b.max_value();
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) / scale < 1e-5);
}

TEST_CASE("rotating a symmetric point set by 90 degrees permutes the map") {
    PointSet ps;
    ps.width = 17;
    ps.height = 17;
    ps.points = {{4.5, 8.5}, {12.5, 8.5}};
    PointSet rot = ps;
    // (x, y) -> (W - y, x) about the grid center
    for (Point& p : rot.points) p = {17.0 - p.y, p.x};
    KernelSpec spec;
    spec.params = {3.0, 6.0};
    const GridMap a = generate_hd_papm(ps, spec);
    const GridMap b = generate_hd_papm(rot, spec);
    for (int r = 0; r < 17; ++r)
        for (int c = 0; c < 17; ++c)
            CHECK(a.at(r, c) == doctest::Approx(b.at(c, 16 - r)).epsilon(1e-12));
}

TEST_CASE("strided generation keeps the counting property") {
    PointSet ps;
    ps.width = 32;
    ps.height = 32;
    ps.points = {{5.5, 6.5}, {25.0, 18.0}};
    KernelSpec spec;
    spec.params = {4.0, 8.0};
    spec.stride = 4;
    const GridMap m = generate_hd_papm(ps, spec);
    CHECK(m.rows == 8);
    CHECK(m.cols == 8);
    CHECK(std::abs(m.total_mass() - 2.0) < 1e-9);
}

TEST_CASE("l2 loss on identical maps is zero with zero gradient") {
    GridMap a(3, 3, 0.7);
    const L2Loss l = l2_loss(a, a);
    CHECK(l.value == 0.0);
    for (double g : l.grad.values) CHECK(g == 0.0);
}

TEST_CASE("l2 loss of a single-pixel bump is quadratic with matching gradient") {
    GridMap target(4, 4, 0.25);
    GridMap pred = target;
    pred.at(1, 2) += 0.3;
    const L2Loss l = l2_loss(pred, target);
    CHECK(l.value == doctest::Approx(0.5 * 0.3 * 0.3).epsilon(1e-15));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(l.grad.at(r, c) == doctest::Approx(r == 1 && c == 2 ? 0.3 : 0.0));
}

TEST_CASE("l2 loss gradient matches central finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GridMap pred(4, 4), target(4, 4);
    for (double& v : pred.values) v = u(rng);
    for (double& v : target.values) v = u(rng);
    const L2Loss l = l2_loss(pred, target);
    const double h = 1e-6;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        GridMap hi = pred, lo = pred;
        hi.values[k] += h;
        lo.values[k] -= h;
        const double fd = (l2_loss(hi, target).value - l2_loss(lo, target).value) / (2.0 * h);
        CHECK(std::abs(fd - l.grad.values[k]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("l2 loss rejects shape mismatches") {
    CHECK_THROWS_AS((l2_loss(GridMap(2, 2), GridMap(2, 3))), std::invalid_argument);
}
