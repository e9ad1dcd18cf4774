#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "arisim/channel.hpp"
#include "test_support.hpp"

using namespace arisim;
using testsupport::random_instance;
using testsupport::random_theta;

namespace {

// hand-built channel set with unit gains everywhere, L = 1
ChannelSet unit_channelset(int m_count, int k_count) {
    ChannelSet cs;
    cs.direct = Eigen::MatrixXcd::Ones(m_count, k_count);
    cs.uav_to_ris.assign(m_count, Eigen::VectorXcd::Ones(1));
    cs.ris_to_gu.assign(k_count, Eigen::VectorXcd::Ones(1));
    return cs;
}

} // namespace

TEST_SUITE("channel") {

TEST_CASE("path loss at the reference distance") {
    ChannelConstants c;
    c.beta = 1e-3;
    c.alpha0 = 2.0;
    CHECK(pathloss_gain(1.0, c) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(pathloss_gain(10.0, c) == doctest::Approx(1e-5).epsilon(1e-12));
    c.alpha0 = 2.2;
    // beta * d^-alpha0 = 1e-3 * 100^-2.2 = 1e-3 * 10^-4.4
    CHECK(pathloss_gain(100.0, c) ==
          doctest::Approx(3.9810717055349695e-08).epsilon(1e-12));
    CHECK_THROWS_AS(pathloss_gain(0.0, c), std::domain_error);
}

TEST_CASE("degenerate single-element array at unit distances") {
    // equilateral triangle of unit edges: all links see the reference gain
    ChannelConstants c;
    c.elements = 1;
    const std::vector<Position> uavs{{0, 0, 1}};
    const Position ris{std::sqrt(3.0) / 2.0, 0.0, 0.5};
    const std::vector<Position> gus{{0, 0, 0}};
    const ChannelSet cs = build_channels(uavs, ris, gus, c, 1);
    const double amp = std::sqrt(c.beta);
    CHECK(std::abs(cs.direct(0, 0)) == doctest::Approx(amp).epsilon(1e-12));
    CHECK(std::abs(cs.uav_to_ris[0][0]) == doctest::Approx(amp).epsilon(1e-12));
    CHECK(std::abs(cs.ris_to_gu[0][0]) == doctest::Approx(amp).epsilon(1e-12));
}

TEST_CASE("cascade entries are the element-wise leg product") {
    std::mt19937_64 gen(3);
    const auto inst = random_instance(gen, 2, 3, 6);
    for (int m = 0; m < 2; ++m) {
        for (int k = 0; k < 3; ++k) {
            const Eigen::VectorXcd casc = inst.cs.cascade(m, k);
            for (int l = 0; l < 6; ++l) {
                const std::complex<double> want =
                    inst.cs.uav_to_ris[m][l] * inst.cs.ris_to_gu[k][l];
                CHECK(std::abs(casc[l] - want) <= 1e-15);
            }
        }
    }
}

TEST_CASE("same seed gives bit-identical channels") {
    std::mt19937_64 gen(5);
    auto inst = random_instance(gen, 2, 4, 5);
    inst.constants.rician_fading = true;
    const ChannelSet a = build_channels(inst.uavs, inst.ris, inst.gus, inst.constants, 99);
    const ChannelSet b = build_channels(inst.uavs, inst.ris, inst.gus, inst.constants, 99);
    CHECK(a.direct == b.direct);
    for (int m = 0; m < 2; ++m) CHECK(a.uav_to_ris[m] == b.uav_to_ris[m]);
    for (int k = 0; k < 4; ++k) CHECK(a.ris_to_gu[k] == b.ris_to_gu[k]);
    const ChannelSet other = build_channels(inst.uavs, inst.ris, inst.gus, inst.constants, 100);
    CHECK(a.direct != other.direct);
}

TEST_CASE("all-real alignment sums to two") {
    const ChannelSet cs = unit_channelset(1, 1);
    const PhaseShiftVector theta = PhaseShiftVector::all_ones(1);
    const std::complex<double> h = equivalent_channel(cs, theta, 0, 0);
    CHECK(h.real() == doctest::Approx(2.0));
    CHECK(h.imag() == doctest::Approx(0.0));
    CHECK(optimistic_norm(cs, 0, 0) == doctest::Approx(2.0));
}

TEST_CASE("co-phasing attains the optimistic norm") {
    std::mt19937_64 gen(7);
    const auto inst = random_instance(gen, 2, 3, 8);
    for (int m = 0; m < 2; ++m) {
        for (int k = 0; k < 3; ++k) {
            const Eigen::VectorXcd casc = inst.cs.cascade(m, k);
            Eigen::VectorXd angles(8);
            const double target = std::arg(inst.cs.direct(m, k));
            for (int l = 0; l < 8; ++l) angles[l] = target - std::arg(casc[l]);
            const PhaseShiftVector theta = PhaseShiftVector::from_angles(angles);
            const double got = std::abs(equivalent_channel(inst.cs, theta, m, k));
            CHECK(got == doctest::Approx(optimistic_norm(inst.cs, m, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("equivalent channel matches a direct complex evaluation") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_instance(gen, 2, 3, 5);
        PhaseShiftVector theta;
        theta.theta = random_theta(gen, 5);
        for (int m = 0; m < 2; ++m) {
            for (int k = 0; k < 3; ++k) {
                const auto got = equivalent_channel(inst.cs, theta, m, k);
                const auto want = testsupport::naive_equivalent(inst.cs, theta.theta, m, k);
                CHECK(std::abs(got - want) <= 1e-15 + 1e-12 * std::abs(want));
            }
        }
    }
}

TEST_CASE("optimistic norm bounds every phase choice") {
    std::mt19937_64 gen(13);
    const auto inst = random_instance(gen, 2, 2, 6);
    for (int trial = 0; trial < 10000; ++trial) {
        PhaseShiftVector theta;
        theta.theta = random_theta(gen, 6);
        const int m = trial % 2, k = (trial / 2) % 2;
        const double mag = std::abs(equivalent_channel(inst.cs, theta, m, k));
        CHECK(mag <= optimistic_norm(inst.cs, m, k) * (1.0 + 1e-12));
    }
}

TEST_CASE("zero cascade leaves only the direct link") {
    ChannelSet cs = unit_channelset(1, 1);
    cs.uav_to_ris[0].setZero();
    const PhaseShiftVector theta = PhaseShiftVector::all_ones(1);
    CHECK(std::abs(equivalent_channel(cs, theta, 0, 0)) == doctest::Approx(1.0));
    CHECK(optimistic_norm(cs, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("unit modulus bookkeeping") {
    PhaseShiftVector v;
    v.theta = Eigen::VectorXcd::Zero(3);
    v.theta[0] = {0.5, 0.0};
    v.theta[1] = {0.0, 2.0};
    CHECK_FALSE(v.unit_modulus());
    v.renormalize();
    CHECK(v.unit_modulus());
    CHECK(v.theta[2] == std::complex<double>(1.0, 0.0));  // zero entries become one
}

TEST_CASE("dual mode with every UAV active reduces to the direct channel") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> coord(0.0, 300.0);
    ChannelConstants c;
    c.elements = 4;
    const std::vector<Position> uavs{{coord(gen), coord(gen), 30},
                                     {coord(gen), coord(gen), 30},
                                     {coord(gen), coord(gen), 30}};
    const std::vector<Position> gus{{coord(gen), coord(gen), 0}, {coord(gen), coord(gen), 0}};
    const DualChannelSet dcs = build_dual_channels(uavs, gus, c, 23);
    const std::vector<int> modes{1, 1, 1};
    const std::vector<PhaseShiftVector> thetas(3, PhaseShiftVector::all_ones(4));
    for (int m = 0; m < 3; ++m) {
        for (int k = 0; k < 2; ++k) {
            CHECK(dualmode_channel(dcs, modes, thetas, m, k) == dcs.direct(m, k));
        }
    }
}

TEST_CASE("a single passive UAV is exactly the fixed reflector") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> coord(0.0, 300.0);
    ChannelConstants c;
    c.elements = 5;
    const Position active{coord(gen), coord(gen), 30};
    const Position passive{coord(gen), coord(gen), 30};
    const std::vector<Position> gus{{coord(gen), coord(gen), 0}, {coord(gen), coord(gen), 0}};

    const std::vector<Position> both{active, passive};
    const DualChannelSet dcs = build_dual_channels(both, gus, c, 31);
    const std::vector<Position> only_active{active};
    const ChannelSet cs = build_channels(only_active, passive, gus, c, 31);

    const std::vector<int> modes{1, 0};
    std::vector<PhaseShiftVector> thetas(2, PhaseShiftVector::all_ones(5));
    std::mt19937_64 tgen(37);
    thetas[1].theta = random_theta(tgen, 5);
    for (int k = 0; k < 2; ++k) {
        const auto dual = dualmode_channel(dcs, modes, thetas, 0, k);
        const auto fixed = equivalent_channel(cs, thetas[1], 0, k);
        CHECK(dual == fixed);  // bit-exact reduction
    }
}

TEST_CASE("stacked evaluation equals the explicit per-P-UAV sum") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> coord(0.0, 300.0);
    ChannelConstants c;
    c.elements = 4;
    std::vector<Position> uavs;
    for (int i = 0; i < 3; ++i) uavs.push_back({coord(gen), coord(gen), 30});
    std::vector<Position> gus;
    for (int i = 0; i < 2; ++i) gus.push_back({coord(gen), coord(gen), 0});
    const DualChannelSet dcs = build_dual_channels(uavs, gus, c, 41);
    const std::vector<int> modes{1, 0, 0};  // receiver 0, two reflecting UAVs
    std::vector<PhaseShiftVector> thetas;
    for (int i = 0; i < 3; ++i) {
        PhaseShiftVector t;
        t.theta = random_theta(gen, 4);
        thetas.push_back(t);
    }
    for (int k = 0; k < 2; ++k) {
        std::complex<double> want = dcs.direct(0, k);
        for (int s = 1; s < 3; ++s) {
            for (int l = 0; l < 4; ++l) {
                want += dcs.inter_uav[0][s][l] * dcs.surface_to_gu[s][k][l] * thetas[s].theta[l];
            }
        }
        const auto got = dualmode_channel(dcs, modes, thetas, 0, k);
        CHECK(std::abs(got - want) <= 1e-15 + 1e-12 * std::abs(want));
    }
}

TEST_CASE("passive receivers are rejected") {
    ChannelConstants c;
    c.elements = 2;
    const std::vector<Position> uavs{{0, 0, 30}, {100, 0, 30}};
    const std::vector<Position> gus{{50, 50, 0}};
    const DualChannelSet dcs = build_dual_channels(uavs, gus, c, 1);
    const std::vector<int> modes{0, 1};
    const std::vector<PhaseShiftVector> thetas(2, PhaseShiftVector::all_ones(2));
    CHECK_THROWS_AS(dualmode_channel(dcs, modes, thetas, 0, 0), std::invalid_argument);
}

} // TEST_SUITE
