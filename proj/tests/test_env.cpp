#include <doctest.h>

#include <cmath>
#include <random>

#include "arisim/env.hpp"
#include "arisim/optimize.hpp"
#include "arisim/rng.hpp"

using namespace arisim;

namespace {

Scenario desk_scenario(SchemeKind scheme, int m_count = 2, int k_count = 4, int elements = 3) {
    Scenario sc;
    sc.scheme = scheme;
    sc.num_uavs = m_count;
    sc.num_gus = k_count;
    sc.channel.elements = elements;
    sc.slots = 5;
    sc.area_side = 300.0;
    sc.episodes = 1;
    sc.eval_episodes = 1;
    sc.master_seed = 42;
    sc.radio.gamma = 0.01;
    sc.learner.hidden = {8};
    sc.learner.batch_size = 8;
    sc.learner.buffer_capacity = 1024;
    return sc;
}

std::vector<Eigen::VectorXd> still_actions(const Env& env) {
    std::vector<Eigen::VectorXd> actions;
    for (int d : env.action_dims()) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
        a[1] = -1.0;  // zero speed
        if (d > 2) a[2] = 1.0;  // stay active
        actions.push_back(a);
    }
    return actions;
}

} // namespace

TEST_SUITE("env") {

TEST_CASE("reset is deterministic per seed") {
    const Scenario sc = desk_scenario(SchemeKind::FixedAris);
    Env a(sc), b(sc);
    a.reset(3);
    b.reset(3);
    REQUIRE(a.gu_positions().size() == b.gu_positions().size());
    for (std::size_t k = 0; k < a.gu_positions().size(); ++k) {
        CHECK(a.gu_positions()[k].x == b.gu_positions()[k].x);
        CHECK(a.gu_positions()[k].y == b.gu_positions()[k].y);
    }
    for (int i = 0; i < a.num_agents(); ++i) CHECK(a.agent_state(i) == b.agent_state(i));
}

TEST_CASE("degenerate cluster collapses onto the PoI") {
    Scenario sc = desk_scenario(SchemeKind::AllActive);
    sc.layout = GuLayout::Clustered;
    sc.pois = {{120.0, 80.0}};
    sc.poi_stddev = 0.0;
    Env env(sc);
    for (const Position& z : env.gu_positions()) {
        CHECK(z.x == doctest::Approx(120.0));
        CHECK(z.y == doctest::Approx(80.0));
    }
}

TEST_CASE("uniform layout is centered on average") {
    Scenario sc = desk_scenario(SchemeKind::AllActive, 1, 4, 1);
    sc.slots = 1;
    double sum_x = 0.0, sum_y = 0.0;
    const int trials = 10000;
    Env env(sc);
    for (int t = 0; t < trials; ++t) {
        Scenario s = sc;
        s.master_seed = 1000 + t;
        Env e(s);
        for (const Position& z : e.gu_positions()) {
            sum_x += z.x;
            sum_y += z.y;
        }
    }
    const int draws = trials * sc.num_gus;
    const double mean_x = sum_x / draws, mean_y = sum_y / draws;
    // std error of the mean of U(0, A) over n draws
    const double sigma = sc.area_side / std::sqrt(12.0) / std::sqrt(draws);
    CHECK(std::abs(mean_x - sc.area_side / 2.0) <= 3.0 * sigma);
    CHECK(std::abs(mean_y - sc.area_side / 2.0) <= 3.0 * sigma);
}

TEST_CASE("zero speed and empty queues leave only penalties") {
    Scenario sc = desk_scenario(SchemeKind::FixedAris);
    sc.arrival_max = 0.0;  // nothing ever arrives
    Env env(sc);
    env.reset(0);
    const auto before = env.platform_positions();
    const StepOutcome out = env.step(still_actions(env));
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(out.positions[i].x == before[i].x);
        CHECK(out.positions[i].y == before[i].y);
    }
    CHECK(out.collected.sum() == 0.0);
    for (int i = 0; i < env.num_agents(); ++i) {
        if (!out.violations[i]) CHECK(out.rewards[i] == 0.0);
    }
}

TEST_CASE("mode logit zero decodes as active") {
    Scenario sc = desk_scenario(SchemeKind::DmSwitching);
    Env env(sc);
    env.reset(0);
    auto actions = still_actions(env);
    for (auto& a : actions) a[2] = 0.0;  // boundary logit
    const StepOutcome out = env.step(actions);
    for (int mode : out.modes) CHECK(mode == 1);
}

TEST_CASE("pinned-active dual mode matches the all-active scheme") {
    Scenario dm = desk_scenario(SchemeKind::DmSwitching);
    Scenario aa = desk_scenario(SchemeKind::AllActive);
    Env env_dm(dm), env_aa(aa);
    env_dm.reset(0);
    env_aa.reset(0);
    Rng rng(77);
    for (int slot = 0; slot < dm.slots; ++slot) {
        std::vector<Eigen::VectorXd> a_dm, a_aa;
        for (int i = 0; i < dm.num_uavs; ++i) {
            Eigen::VectorXd a(3);
            a << rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0;
            a_dm.push_back(a);
            a_aa.push_back(a.head(2));
        }
        const StepOutcome o_dm = env_dm.step(a_dm);
        const StepOutcome o_aa = env_aa.step(a_aa);
        for (int i = 0; i < dm.num_uavs; ++i) {
            CHECK(o_dm.positions[i].x == o_aa.positions[i].x);
            CHECK(o_dm.positions[i].y == o_aa.positions[i].y);
        }
        CHECK((o_dm.rates - o_aa.rates).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((o_dm.collected - o_aa.collected).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((o_dm.rewards - o_aa.rewards).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("a pinned-passive dual UAV reproduces the fixed reflector") {
    const int m_active = 2, k_count = 4, elements = 3;
    Scenario fixed = desk_scenario(SchemeKind::FixedAris, m_active, k_count, elements);
    fixed.uav_starts = {{60.0, 150.0}, {240.0, 150.0}};
    fixed.reflector_start = {{150.0, 150.0}};

    Scenario dm = desk_scenario(SchemeKind::DmSwitching, m_active + 1, k_count, elements);
    dm.uav_starts = {{60.0, 150.0}, {240.0, 150.0}, {150.0, 150.0}};
    dm.mode_pin = {1, 1, 0};

    Env env_fixed(fixed), env_dm(dm);
    env_fixed.reset(0);
    env_dm.reset(0);
    Rng rng(99);
    for (int slot = 0; slot < fixed.slots; ++slot) {
        std::vector<Eigen::VectorXd> a_fixed, a_dm;
        for (int i = 0; i < m_active + 1; ++i) {
            Eigen::VectorXd a(2);
            a << rng.uniform(-1, 1), rng.uniform(-1, 1);
            a_fixed.push_back(a);
            Eigen::VectorXd b(3);
            b << a[0], a[1], i < m_active ? 1.0 : -1.0;
            a_dm.push_back(b);
        }
        const StepOutcome o_fixed = env_fixed.step(a_fixed);
        const StepOutcome o_dm = env_dm.step(a_dm);
        for (int i = 0; i < m_active + 1; ++i) {
            CHECK(o_fixed.positions[i].x == doctest::Approx(o_dm.positions[i].x));
            CHECK(o_fixed.positions[i].y == doctest::Approx(o_dm.positions[i].y));
        }
        // the passive row of the dual association stays empty
        for (int k = 0; k < k_count; ++k) CHECK(o_dm.assoc.rho(m_active, k) == 0.0);
        const double tol = 1e-9;
        CHECK((o_fixed.rates - o_dm.rates.topRows(m_active)).cwiseAbs().maxCoeff() <= tol);
        CHECK((o_fixed.collected - o_dm.collected.head(m_active)).cwiseAbs().maxCoeff() <= tol);
        CHECK((o_fixed.rewards - o_dm.rewards).cwiseAbs().maxCoeff() <= tol);
    }
}

TEST_CASE("single pair collection composes the module pieces") {
    Scenario sc = desk_scenario(SchemeKind::FixedAris, 1, 1, 3);
    sc.arrival_max = 5.0;
    Env env(sc);
    env.reset(0);
    // slot 0 has an empty buffer, so nothing transmits until slot 1
    const StepOutcome first = env.step(still_actions(env));
    CHECK(first.collected.sum() == 0.0);
    const StepOutcome out = env.step(still_actions(env));

    // independent recomputation from the recorded geometry
    const std::vector<Position> uavs{out.positions[0]};
    const ChannelSet cs = build_channels(uavs, out.positions[1], env.gu_positions(),
                                         sc.channel,
                                         substream_seed(sc.master_seed, "chan", 0, 1));
    AssociationMatrix assoc = AssociationMatrix::zeros(1, 1);
    assoc.rho(0, 0) = 1.0;
    const ReflectionModel model = ReflectionModel::from_fixed(cs);
    const PhaseShiftVector theta =
        solve_phases(model, assoc, sc.radio, PhaseStrategy::Heuristic);
    const double gain = std::norm(model.equivalent_gain(theta.theta, 0, 0));
    const double rate = std::log1p(sc.radio.p_g * gain / sc.radio.sigma2);
    Rng arr0(substream_seed(sc.master_seed, "arr", 0, 0));
    Rng arr1(substream_seed(sc.master_seed, "arr", 0, 1));
    const double backlog =
        std::min(arr0.uniform(0.0, sc.arrival_max) + arr1.uniform(0.0, sc.arrival_max),
                 sc.queue_capacity);
    const double want = std::min(sc.mobility.tau * rate, backlog);
    CHECK(out.collected[0] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("one-slot episodes aggregate a single outcome") {
    Scenario sc = desk_scenario(SchemeKind::FixedAris);
    sc.slots = 1;
    Env env(sc);
    AgentEnsemble agents = make_ensemble(env, sc.learner, 5);
    std::vector<StepOutcome> outcomes;
    const EpisodeMetrics m = run_episode(env, 0, agents, false, false, &outcomes);
    REQUIRE(outcomes.size() == 1);
    CHECK(m.throughput == doctest::Approx(outcomes[0].collected.sum()));
    CHECK(m.agent_returns == outcomes[0].rewards);
}

TEST_CASE("evaluation episodes are reproducible") {
    const Scenario sc = desk_scenario(SchemeKind::DmSwitching);
    Env env1(sc), env2(sc);
    AgentEnsemble a1 = make_ensemble(env1, sc.learner, 7);
    AgentEnsemble a2 = make_ensemble(env2, sc.learner, 7);
    const EpisodeMetrics m1 = run_episode(env1, 0, a1, false, false);
    const EpisodeMetrics m2 = run_episode(env2, 0, a2, false, false);
    CHECK(m1.throughput == m2.throughput);
    CHECK(m1.agent_returns == m2.agent_returns);
    CHECK(m1.violation_count == m2.violation_count);
}

TEST_CASE("episode throughput equals the collected history sum") {
    Scenario sc = desk_scenario(SchemeKind::AllActive);
    sc.slots = 8;
    Env env(sc);
    AgentEnsemble agents = make_ensemble(env, sc.learner, 9);
    const EpisodeMetrics m = run_episode(env, 0, agents, false, true);
    CHECK(m.throughput == episode_throughput(m.collected_history));
    CHECK(m.throughput_bits == doctest::Approx(m.throughput / std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("stored transitions reproduce their slot rewards") {
    Scenario sc = desk_scenario(SchemeKind::DmSwitching);
    Env env(sc);
    env.reset(0);
    Rng rng(111);
    while (!env.done()) {
        std::vector<Eigen::VectorXd> actions;
        for (int d : env.action_dims()) {
            Eigen::VectorXd a(d);
            for (int i = 0; i < d; ++i) a[i] = rng.uniform(-1, 1);
            actions.push_back(a);
        }
        const StepOutcome out = env.step(actions);
        const Eigen::VectorXd again = compute_rewards(out.reward_inputs, sc.reward_weights);
        CHECK(out.transition.rewards == again);
        CHECK(out.transition.rewards == out.rewards);
    }
}

TEST_CASE("queues stay inside their bounds across a run") {
    Scenario sc = desk_scenario(SchemeKind::FixedAris);
    sc.slots = 20;
    sc.arrival_max = 40.0;  // heavy load
    Env env(sc);
    AgentEnsemble agents = make_ensemble(env, sc.learner, 13);
    std::vector<StepOutcome> outcomes;
    run_episode(env, 0, agents, false, true, &outcomes);
    for (const auto& out : outcomes) {
        CHECK((out.backlog_after.array() >= 0.0).all());
        CHECK((out.backlog_after.array() <= sc.queue_capacity).all());
    }
}

} // TEST_SUITE
