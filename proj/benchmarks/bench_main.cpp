// Microbenchmarks for the per-slot hot path: channel synthesis, SINR
// evaluation, the inner solvers, and one learner step.

#include <benchmark/benchmark.h>

#include <random>

#include "arisim/env.hpp"
#include "arisim/optimize.hpp"

using namespace arisim;

namespace {

struct Fixture {
    std::vector<Position> uavs;
    Position ris;
    std::vector<Position> gus;
    ChannelConstants constants;
    RadioParams radio{.p_g = 1.0, .sigma2 = 1e-12, .gamma = 0.05};
    ChannelSet cs;
    ReflectionModel model;
    AssociationMatrix assoc;
    PhaseShiftVector theta;

    explicit Fixture(int m_count = 3, int k_count = 9, int elements = 30) {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> coord(0.0, 1000.0);
        constants.elements = elements;
        for (int m = 0; m < m_count; ++m) uavs.push_back({coord(gen), coord(gen), 30.0});
        ris = {coord(gen), coord(gen), 30.0};
        for (int k = 0; k < k_count; ++k) gus.push_back({coord(gen), coord(gen), 0.0});
        cs = build_channels(uavs, ris, gus, constants, 11);
        model = ReflectionModel::from_fixed(cs);
        assoc = AssociationMatrix::zeros(m_count, k_count);
        for (int k = 0; k < k_count; ++k) assoc.rho(k % m_count, k) = 1.0;
        theta = PhaseShiftVector::all_ones(elements);
    }
};

void BM_BuildChannels(benchmark::State& state) {
    Fixture f;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_channels(f.uavs, f.ris, f.gus, f.constants, ++seed));
    }
}
BENCHMARK(BM_BuildChannels);

void BM_EquivalentGains(benchmark::State& state) {
    Fixture f;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.model.equivalent_gains(f.theta.theta));
    }
}
BENCHMARK(BM_EquivalentGains);

void BM_ComputeSinr(benchmark::State& state) {
    Fixture f;
    const Eigen::MatrixXcd equiv = f.model.equivalent_gains(f.theta.theta);
    const DecodingOrder order = decode_order(f.model.optimistic_norms(), f.assoc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_sinr(equiv, f.assoc, order, f.radio));
    }
}
BENCHMARK(BM_ComputeSinr);

void BM_PhaseHeuristic(benchmark::State& state) {
    Fixture f;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_phases(f.model, f.assoc, f.radio, PhaseStrategy::Heuristic));
    }
}
BENCHMARK(BM_PhaseHeuristic);

void BM_PhaseCoordDescent(benchmark::State& state) {
    Fixture f(2, 4, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_phases(f.model, f.assoc, f.radio, PhaseStrategy::CoordDescent));
    }
}
BENCHMARK(BM_PhaseCoordDescent);

void BM_AssociationSca(benchmark::State& state) {
    Fixture f(2, 6, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_association(f.model, f.theta, f.radio, Eigen::VectorXd(),
                                                   AssocStrategy::Sca));
    }
}
BENCHMARK(BM_AssociationSca);

void BM_TwoStepInner(benchmark::State& state) {
    Fixture f(2, 6, 8);
    OptimizeConfig cfg;
    cfg.two_step = true;
    cfg.phase_strategy = PhaseStrategy::Heuristic;
    for (auto _ : state) {
        benchmark::DoNotOptimize(alternate_optimize(f.model, f.radio, Eigen::VectorXd(), cfg));
    }
}
BENCHMARK(BM_TwoStepInner);

void BM_EnvStep(benchmark::State& state) {
    Scenario sc;
    sc.scheme = SchemeKind::DmSwitching;
    sc.num_uavs = 2;
    sc.num_gus = 6;
    sc.channel.elements = 8;
    sc.area_side = 600.0;
    sc.slots = 1000000;  // stepped manually
    Env env(sc);
    std::vector<Eigen::VectorXd> actions;
    for (int d : env.action_dims()) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
        a[1] = -0.5;
        if (d > 2) a[2] = 1.0;
        actions.push_back(a);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(env.step(actions));
    }
}
BENCHMARK(BM_EnvStep);

void BM_TrainStep(benchmark::State& state) {
    Scenario sc;
    sc.scheme = SchemeKind::DmSwitching;
    sc.num_uavs = 2;
    sc.num_gus = 6;
    sc.channel.elements = 8;
    sc.area_side = 600.0;
    sc.learner.hidden = {32, 32};
    sc.learner.batch_size = 64;
    Env env(sc);
    AgentEnsemble agents = make_ensemble(env, sc.learner, 3);
    run_episode(env, 0, agents, true, true);
    run_episode(env, 1, agents, true, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agents.train_step());
    }
}
BENCHMARK(BM_TrainStep);

} // namespace

BENCHMARK_MAIN();
