#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "papm/ggd.hpp"
#include "papm/metrics.hpp"

using namespace papm;

TEST_CASE("mae_mse hand arithmetic") {
    {
        const std::vector<EvalRecord> r{{4.0, 4.0}, {7.0, 7.0}};
        auto [mae, mse] = mae_mse(r);
        CHECK(mae == 0.0);
        CHECK(mse == 0.0);
    }
    {
        const std::vector<EvalRecord> r{{3.0, 4.0}, {5.0, 4.0}};
        auto [mae, mse] = mae_mse(r);
        CHECK(mae == doctest::Approx(1.0));
        CHECK(mse == doctest::Approx(1.0));
    }
    {
        const std::vector<EvalRecord> r{{10.0, 0.0}, {0.0, 10.0}};
        auto [mae, mse] = mae_mse(r);
        CHECK(mae == doctest::Approx(10.0));
        CHECK(mse == doctest::Approx(10.0));
    }
    CHECK_THROWS_AS((mae_mse({})), std::invalid_argument);
}

TEST_CASE("mae never exceeds mse") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<EvalRecord> r(1 + rep % 7);
        for (auto& e : r) e = {u(rng), u(rng)};
        auto [mae, mse] = mae_mse(r);
        CHECK(mae <= mse + 1e-12);
    }
}

namespace {

PointSet points_on(int width, int height, std::vector<Point> pts) {
    PointSet ps;
    ps.width = width;
    ps.height = height;
    ps.points = std::move(pts);
    return ps;
}

} // namespace

TEST_CASE("game level 0 is the absolute count error") {
    GridMap pred(6, 7, 0.1);
    const PointSet ps = points_on(7, 6, {{1.0, 1.0}, {5.5, 4.5}});
    CHECK(game(pred, ps, 0) == doctest::Approx(std::abs(pred.total_mass() - 2.0)).epsilon(1e-12));
}

TEST_CASE("game is zero under perfect per-tile placement") {
    GridMap pred(4, 4);
    pred.at(0, 0) = 1.0;
    pred.at(3, 3) = 1.0;
    const PointSet ps = points_on(4, 4, {{0.5, 0.5}, {3.5, 3.5}});
    for (int level = 0; level <= 2; ++level) CHECK(game(pred, ps, level) == 0.0);
}

TEST_CASE("game level 1 on the displaced-mass instance is 2") {
    GridMap pred(4, 4);
    pred.at(0, 0) = 1.0; // all mass top-left
    const PointSet ps = points_on(4, 4, {{3.5, 3.5}}); // point bottom-right
    CHECK(game(pred, ps, 1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("game never decreases with the level") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const int h = 8 + static_cast<int>(rng() % 17);
        const int w = 8 + static_cast<int>(rng() % 17);
        GridMap pred(h, w);
        for (double& v : pred.values) v = u(rng) < 0.2 ? u(rng) : 0.0;
        PointSet ps;
        ps.width = w;
        ps.height = h;
        const int n = static_cast<int>(rng() % 6);
        for (int k = 0; k < n; ++k)
            ps.points.push_back({u(rng) * (w - 1e-9), u(rng) * (h - 1e-9)});
        double prev = game(pred, ps, 0);
        for (int level = 1; level <= 3; ++level) {
            const double cur = game(pred, ps, level);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("game rejects grids smaller than the tiling") {
    GridMap pred(3, 3, 0.0);
    const PointSet ps = points_on(3, 3, {});
    CHECK_THROWS_AS((game(pred, ps, 2)), std::invalid_argument);
}

TEST_CASE("localization recovers well-separated kernel peaks perfectly") {
    const PointSet ps = points_on(48, 32, {{8.2, 9.7}, {24.5, 16.5}, {40.8, 25.1}});
    KernelSpec spec; // sigma=4, s=8
    const GridMap pred = generate_hd_papm(ps, spec);
    const MatchResult res = localize_and_match(pred, ps, 0.5, 4.0);
    CHECK(res.precision == 1.0);
    CHECK(res.recall == 1.0);
    CHECK(res.f1 == 1.0);
    CHECK(res.matches.size() == 3);
}

TEST_CASE("all-zero prediction yields zero precision and recall") {
    GridMap pred(8, 8);
    const PointSet ps = points_on(8, 8, {{4.0, 4.0}});
    const MatchResult res = localize_and_match(pred, ps, 0.5, 4.0);
    CHECK(res.predicted.empty());
    CHECK(res.precision == 0.0);
    CHECK(res.recall == 0.0);
    CHECK(res.f1 == 0.0);
}

TEST_CASE("greedy matching is one-to-one: two peaks, one point") {
    GridMap pred(5, 9);
    pred.at(2, 2) = 1.0;
    pred.at(2, 6) = 0.9;
    const PointSet ps = points_on(9, 5, {{4.0, 2.5}});
    const MatchResult res = localize_and_match(pred, ps, 0.5, 8.0);
    REQUIRE(res.predicted.size() == 2);
    CHECK(res.matches.size() == 1);
    CHECK(res.precision == doctest::Approx(0.5));
    CHECK(res.recall == doctest::Approx(1.0));
    // The closer peak (2,2), distance 1.5 vs 2.5, wins the greedy match.
    CHECK(res.matches[0].first == 0);
}

TEST_CASE("matching respects the radius") {
    GridMap pred(5, 5);
    pred.at(0, 0) = 1.0;
    const PointSet ps = points_on(5, 5, {{4.5, 4.5}});
    const MatchResult res = localize_and_match(pred, ps, 0.5, 2.0);
    CHECK(res.matches.empty());
    CHECK(res.precision == 0.0);
    CHECK(res.recall == 0.0);
}
