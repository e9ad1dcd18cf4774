#include <doctest.h>

#include <cmath>
#include <random>

#include "arisim/geometry.hpp"

using namespace arisim;

TEST_SUITE("geometry") {

TEST_CASE("straight-line kinematics") {
    MobilityLimits lim{.v_max = 50.0, .d_min = 5.0, .tau = 1.0, .area_side = 1000.0};
    const Position out = apply_move({0, 0, 30}, 0.0, 10.0, lim);
    CHECK(out.x == doctest::Approx(10.0));
    CHECK(out.y == doctest::Approx(0.0));
    CHECK(out.z == 30.0);
}

TEST_CASE("speed above the limit is clipped") {
    MobilityLimits lim{.v_max = 50.0, .d_min = 5.0, .tau = 1.0, .area_side = 1000.0};
    const Position out = apply_move({0, 0, 30}, 0.0, 80.0, lim);
    CHECK(out.x == doctest::Approx(50.0));
    CHECK(out.y == doctest::Approx(0.0));
}

TEST_CASE("area boundary clips the step") {
    MobilityLimits lim{.v_max = 50.0, .d_min = 5.0, .tau = 1.0, .area_side = 1000.0};
    const Position out = apply_move({995, 0, 30}, 0.0, 10.0, lim);
    CHECK(out.x == doctest::Approx(1000.0));
}

TEST_CASE("safety distance is inclusive at the boundary") {
    MobilityLimits lim{.v_max = 50.0, .d_min = 5.0, .tau = 1.0, .area_side = 1000.0};
    const std::vector<Position> ok{{0, 0, 30}, {5, 0, 30}};
    CHECK(check_safety(ok, lim).ok);

    const std::vector<Position> bad{{0, 0, 30}, {4.9, 0, 30}};
    const SafetyReport report = check_safety(bad, lim);
    CHECK_FALSE(report.ok);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("single platform is vacuously safe") {
    MobilityLimits lim;
    const std::vector<Position> one{{10, 10, 30}};
    CHECK(check_safety(one, lim).ok);
}

TEST_CASE("zero speed is a fixed point") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> coord(0.0, 1000.0), dir(0.0, 6.28);
    MobilityLimits lim;
    for (int i = 0; i < 100; ++i) {
        const Position p{coord(gen), coord(gen), 30.0};
        const Position q = apply_move(p, dir(gen), 0.0, lim);
        CHECK(q.x == p.x);
        CHECK(q.y == p.y);
    }
}

TEST_CASE("step length never exceeds tau * v_max") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> coord(0.0, 1000.0), dir(0.0, 6.28),
        speed(0.0, 200.0);
    MobilityLimits lim{.v_max = 50.0, .d_min = 5.0, .tau = 0.5, .area_side = 1000.0};
    for (int i = 0; i < 500; ++i) {
        const Position p{coord(gen), coord(gen), 30.0};
        const Position q = apply_move(p, dir(gen), speed(gen), lim);
        CHECK(horizontal_distance(p, q) <= lim.tau * lim.v_max + 1e-9);
        CHECK(q.x >= 0.0);
        CHECK(q.x <= lim.area_side);
        CHECK(q.y >= 0.0);
        CHECK(q.y <= lim.area_side);
    }
}

TEST_CASE("pairwise check is order symmetric") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> coord(0.0, 30.0);
    MobilityLimits lim{.v_max = 50.0, .d_min = 8.0, .tau = 1.0, .area_side = 1000.0};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Position> pts;
        for (int i = 0; i < 5; ++i) pts.push_back({coord(gen), coord(gen), 30.0});
        const SafetyReport fwd = check_safety(pts, lim);
        std::vector<Position> rev(pts.rbegin(), pts.rend());
        const SafetyReport bwd = check_safety(rev, lim);
        CHECK(fwd.ok == bwd.ok);
        CHECK(fwd.violations.size() == bwd.violations.size());
        for (const auto& [i, j] : fwd.violations) CHECK(i < j);
    }
}

} // TEST_SUITE
