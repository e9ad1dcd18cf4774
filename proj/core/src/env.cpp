#include "arisim/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arisim/noma.hpp"
#include "arisim/optimize.hpp"
#include "arisim/rng.hpp"

namespace arisim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// actor outputs live in [-1,1]; map them onto direction and speed
double decode_direction(double a) {
    double d = std::fmod((a + 1.0) * std::numbers::pi, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return d;
}

double decode_speed(double a, double v_max) { return (a + 1.0) * 0.5 * v_max; }

double scale01(double x, double lo, double hi) {
    return std::clamp(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

} // namespace

Env::Env(const Scenario& sc) : sc_(sc) {
    sc_.validate();
    // log-scale anchors for the channel-strength features: a surface-aligned
    // link at nadir distance down to four decades below it
    const double nadir = std::sqrt(pathloss_gain(sc_.altitude, sc_.channel));
    norm_feature_hi_ = std::log10((sc_.channel.elements + 1.0) * nadir);
    norm_feature_lo_ = norm_feature_hi_ - 4.0;
    reset(0);
}

int Env::num_platforms() const {
    return sc_.scheme == SchemeKind::FixedAris ? sc_.num_uavs + 1 : sc_.num_uavs;
}

int Env::num_agents() const { return num_platforms(); }

std::vector<int> Env::state_dims() const {
    const int d = 2 + 2 * num_platforms() + 2 * sc_.num_gus;
    return std::vector<int>(num_agents(), d);
}

std::vector<int> Env::action_dims() const {
    const int d = sc_.scheme == SchemeKind::DmSwitching ? 3 : 2;
    return std::vector<int>(num_agents(), d);
}

int Env::optimized_dim() const {
    const int l = sc_.channel.elements;
    const int mk = sc_.num_uavs * sc_.num_gus;
    switch (sc_.scheme) {
        case SchemeKind::FixedAris: return l + mk;
        case SchemeKind::DmSwitching: return sc_.num_uavs + l * sc_.num_uavs + mk;
        case SchemeKind::AllActive: return mk;
    }
    return mk;
}

void Env::reset(int episode) {
    episode_ = episode;
    slot_ = 0;

    // GU layout; one fixed draw per experiment unless regeneration is on
    const std::uint64_t layout_index =
        sc_.regenerate_gus ? static_cast<std::uint64_t>(episode) : 0;
    Rng layout_rng(substream_seed(sc_.master_seed, "layout", layout_index));
    gus_.resize(sc_.num_gus);
    for (int k = 0; k < sc_.num_gus; ++k) {
        if (sc_.layout == GuLayout::Uniform) {
            gus_[k] = {layout_rng.uniform(0.0, sc_.area_side),
                       layout_rng.uniform(0.0, sc_.area_side), 0.0};
        } else {
            const auto& poi = sc_.pois[layout_rng.uniform_int(static_cast<int>(sc_.pois.size()))];
            const double x = poi[0] + sc_.poi_stddev * layout_rng.normal();
            const double y = poi[1] + sc_.poi_stddev * layout_rng.normal();
            gus_[k] = {std::clamp(x, 0.0, sc_.area_side), std::clamp(y, 0.0, sc_.area_side), 0.0};
        }
    }

    // platform starts: explicit, shared, or spread across the mid line
    const int p_count = num_platforms();
    platforms_.resize(p_count);
    for (int i = 0; i < p_count; ++i) {
        std::array<double, 2> xy;
        if (sc_.shared_start) {
            xy = *sc_.shared_start;
        } else if (i < static_cast<int>(sc_.uav_starts.size())) {
            xy = sc_.uav_starts[i];
        } else if (sc_.scheme == SchemeKind::FixedAris && i == p_count - 1 && sc_.reflector_start) {
            xy = *sc_.reflector_start;
        } else {
            const double frac = (i + 1.0) / (p_count + 1.0);
            xy = {frac * sc_.area_side, sc_.area_side / 2.0};
        }
        platforms_[i] = {xy[0], xy[1], sc_.altitude};
    }

    queue_ = QueueState::empty(sc_.num_gus, sc_.queue_capacity, sc_.arrival_max);
    refresh_channels(substream_seed(sc_.master_seed, "chan_init",
                                    static_cast<std::uint64_t>(episode)));
}

void Env::refresh_channels(std::uint64_t seed) {
    std::span<const Position> uavs(platforms_.data(), static_cast<std::size_t>(sc_.num_uavs));
    if (sc_.scheme == SchemeKind::FixedAris) {
        fixed_cs_ = build_channels(uavs, platforms_.back(), gus_, sc_.channel, seed);
    } else {
        dual_cs_ = build_dual_channels(uavs, gus_, sc_.channel, seed);
    }
}

Eigen::VectorXd Env::channel_feature(int agent) const {
    Eigen::VectorXd f(sc_.num_gus);
    for (int k = 0; k < sc_.num_gus; ++k) {
        double norm = 0.0;
        switch (sc_.scheme) {
            case SchemeKind::FixedAris:
                if (agent < sc_.num_uavs) {
                    norm = optimistic_norm(fixed_cs_, agent, k);
                } else {
                    // reflector agent: strongest reflected path it can offer
                    for (int m = 0; m < sc_.num_uavs; ++m) {
                        norm = std::max(norm, fixed_cs_.cascade(m, k).cwiseAbs().sum());
                    }
                }
                break;
            case SchemeKind::DmSwitching: {
                norm = std::abs(dual_cs_.direct(agent, k));
                for (int s = 0; s < sc_.num_uavs; ++s) {
                    if (s == agent) continue;
                    norm += dual_cs_.inter_uav[agent][s]
                                .cwiseProduct(dual_cs_.surface_to_gu[s][k])
                                .cwiseAbs()
                                .sum();
                }
                break;
            }
            case SchemeKind::AllActive:
                norm = std::abs(dual_cs_.direct(agent, k));
                break;
        }
        f[k] = scale01(std::log10(norm + 1e-30), norm_feature_lo_, norm_feature_hi_);
    }
    return f;
}

Eigen::VectorXd Env::agent_state(int i) const {
    const int p_count = num_platforms();
    Eigen::VectorXd s(2 + 2 * p_count + 2 * sc_.num_gus);
    Eigen::Index at = 0;
    s[at++] = scale01(platforms_[i].x, 0.0, sc_.area_side);
    s[at++] = scale01(platforms_[i].y, 0.0, sc_.area_side);
    for (int p = 0; p < p_count; ++p) {
        s[at++] = scale01(platforms_[p].x, 0.0, sc_.area_side);
        s[at++] = scale01(platforms_[p].y, 0.0, sc_.area_side);
    }
    for (int k = 0; k < sc_.num_gus; ++k) {
        s[at++] = scale01(queue_.backlog[k], 0.0, queue_.d_max);
    }
    s.segment(at, sc_.num_gus) = channel_feature(i);
    return s;
}

Eigen::VectorXd Env::optimized_features(const std::vector<int>& modes,
                                        const Eigen::VectorXcd& theta,
                                        const AssociationMatrix& assoc) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(optimized_dim());
    Eigen::Index at = 0;
    if (sc_.scheme == SchemeKind::DmSwitching) {
        for (int m = 0; m < sc_.num_uavs; ++m) f[at++] = modes[m] != 0 ? 1.0 : -1.0;
    }
    if (sc_.scheme != SchemeKind::AllActive) {
        const Eigen::Index want = sc_.scheme == SchemeKind::FixedAris
                                      ? sc_.channel.elements
                                      : static_cast<Eigen::Index>(sc_.channel.elements) * sc_.num_uavs;
        for (Eigen::Index l = 0; l < want; ++l) {
            f[at++] = l < theta.size() ? std::arg(theta[l]) / std::numbers::pi : 0.0;
        }
    }
    for (int m = 0; m < sc_.num_uavs; ++m) {
        for (int k = 0; k < sc_.num_gus; ++k) f[at++] = assoc.rho(m, k);
    }
    return f;
}

OptimizeConfig Env::inner_config() const {
    OptimizeConfig cfg = sc_.optimizer;
    const bool two_step = fast_inner_ ? sc_.train_two_step : !sc_.eval_full_ao;
    cfg.two_step = two_step;
    if (two_step) cfg.phase_strategy = PhaseStrategy::Heuristic;
    return cfg;
}

StepOutcome Env::step(const std::vector<Eigen::VectorXd>& learned_actions) {
    if (done()) throw std::logic_error("Env::step: episode already finished");
    if (static_cast<int>(learned_actions.size()) != num_agents()) {
        throw std::invalid_argument("Env::step: one action per agent required");
    }
    const int m_count = sc_.num_uavs;
    const int k_count = sc_.num_gus;
    const int p_count = num_platforms();

    // states observed before the slot executes
    std::vector<Eigen::VectorXd> states(num_agents());
    for (int i = 0; i < num_agents(); ++i) states[i] = agent_state(i);

    // (1) movement
    if (!sc_.stationary) {
        for (int i = 0; i < p_count; ++i) {
            const auto& a = learned_actions[i];
            platforms_[i] = apply_move(platforms_[i], decode_direction(a[0]),
                                       decode_speed(a[1], sc_.mobility.v_max), sc_.mobility);
        }
    }

    // (2) operating modes
    std::vector<int> modes(m_count, 1);
    if (sc_.scheme == SchemeKind::DmSwitching) {
        if (!sc_.mode_pin.empty()) {
            modes = sc_.mode_pin;
        } else {
            for (int m = 0; m < m_count; ++m) modes[m] = learned_actions[m][2] >= 0.0 ? 1 : 0;
        }
    }
    const bool any_active =
        std::any_of(modes.begin(), modes.end(), [](int a) { return a != 0; });

    // (3) channels at the executed geometry
    refresh_channels(substream_seed(sc_.master_seed, "chan",
                                    static_cast<std::uint64_t>(episode_),
                                    static_cast<std::uint64_t>(slot_)));
    ReflectionModel model;
    switch (sc_.scheme) {
        case SchemeKind::FixedAris: model = ReflectionModel::from_fixed(fixed_cs_); break;
        case SchemeKind::DmSwitching: model = ReflectionModel::from_dual(dual_cs_, modes); break;
        case SchemeKind::AllActive: model = ReflectionModel::direct_only(dual_cs_.direct); break;
    }

    // (4) inner optimization of phases and association
    StepOutcome out;
    out.slot = slot_;
    out.positions = platforms_;
    out.modes = modes;
    out.assoc = AssociationMatrix::zeros(m_count, k_count);
    if (any_active) {
        const Eigen::VectorXd backlog_rates = queue_.backlog / sc_.mobility.tau;
        const AoResult ao = alternate_optimize(model, sc_.radio, backlog_rates, inner_config());
        out.theta = ao.theta.theta;
        out.assoc = ao.assoc;
        out.objective = ao.objective;
    } else {
        out.theta = Eigen::VectorXcd::Ones(model.dim());
    }

    // (5) executed SINR; pairs below the decoding threshold transmit in vain:
    // zero rate and a penalty, the interference they caused stands
    const Eigen::MatrixXcd equivalent = model.equivalent_gains(out.theta);
    const DecodingOrder order = decode_order(model.optimistic_norms(), out.assoc);
    out.sinr = compute_sinr(equivalent, out.assoc, order, sc_.radio);
    std::vector<std::uint8_t> sinr_violation(m_count, 0);
    if (sc_.access == AccessKind::Noma) {
        const RateReport rr = rates_and_feasibility(out.sinr, out.assoc, sc_.radio);
        out.rates = rr.rates;
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (out.assoc.rho(m, k) > 0.5 && rr.feasible(m, k) == 0) {
                    out.rates(m, k) = 0.0;
                    sinr_violation[m] = 1;
                }
            }
        }
    } else {
        const AccessScheme scheme =
            sc_.access == AccessKind::Tdma ? AccessScheme::Tdma : AccessScheme::Fdma;
        const OmaReport oma = oma_baseline_rates(equivalent, out.assoc, sc_.radio, scheme);
        out.rates = oma.rates;
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (out.assoc.rho(m, k) > 0.5 && oma.sinr(m, k) < sc_.radio.gamma) {
                    out.rates(m, k) = 0.0;
                    sinr_violation[m] = 1;
                }
            }
        }
    }

    // (6) queue update
    Rng arrival_rng(substream_seed(sc_.master_seed, "arr", static_cast<std::uint64_t>(episode_),
                                   static_cast<std::uint64_t>(slot_)));
    out.arrivals.resize(k_count);
    for (int k = 0; k < k_count; ++k) out.arrivals[k] = arrival_rng.uniform(0.0, queue_.arrival_max);
    const QueueStepResult qr = step_queue(queue_, out.arrivals, out.rates, sc_.mobility.tau);
    out.pre_backlog = qr.pre;
    out.backlog_after = qr.next.backlog;
    out.collected = qr.collected;
    queue_ = qr.next;

    // (7) rewards
    const SafetyReport safety = check_safety(platforms_, sc_.mobility);
    out.violations.assign(num_agents(), 0);
    for (const auto& [i, j] : safety.violations) {
        out.violations[i] = 1;
        out.violations[j] = 1;
    }
    for (int m = 0; m < m_count; ++m) {
        if (sinr_violation[m]) out.violations[m] = 1;
    }
    if (sc_.scheme == SchemeKind::DmSwitching && !any_active) {
        // nobody collects; the whole fleet is told so
        std::fill(out.violations.begin(), out.violations.end(), 1);
    }

    RewardInputs ri;
    ri.scheme = sc_.scheme;
    ri.collect = out.collected;
    ri.violation = out.violations;
    ri.modes = sc_.scheme == SchemeKind::DmSwitching ? modes : std::vector<int>();
    if (sc_.scheme == SchemeKind::FixedAris) {
        double improvement = 0.0;
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (out.assoc.rho(m, k) > 0.5) {
                    improvement += std::abs(equivalent(m, k) - fixed_cs_.direct(m, k));
                }
            }
        }
        ri.improvement = Eigen::VectorXd::Constant(1, improvement);
    } else if (sc_.scheme == SchemeKind::DmSwitching) {
        ri.improvement = Eigen::VectorXd::Zero(m_count);
        const int l = sc_.channel.elements;
        for (int s = 0; s < m_count; ++s) {
            if (modes[s] != 0) continue;
            const Eigen::VectorXcd theta_s = out.theta.segment(static_cast<Eigen::Index>(s) * l, l);
            double improvement = 0.0;
            for (int m = 0; m < m_count; ++m) {
                if (modes[m] == 0 || m == s) continue;
                for (int k = 0; k < k_count; ++k) {
                    if (out.assoc.rho(m, k) <= 0.5) continue;
                    const Eigen::VectorXcd casc =
                        dual_cs_.inter_uav[m][s].cwiseProduct(dual_cs_.surface_to_gu[s][k]);
                    improvement += std::abs(casc.cwiseProduct(theta_s).sum());
                }
            }
            ri.improvement[s] = improvement;
        }
    }
    out.rewards = compute_rewards(ri, sc_.reward_weights);
    out.reward_inputs = ri;

    // (8) transition record
    ++slot_;
    Transition tr;
    tr.states = std::move(states);
    tr.learned_actions = learned_actions;
    tr.optimized_action = optimized_features(modes, out.theta, out.assoc);
    tr.rewards = out.rewards;
    tr.next_states.resize(num_agents());
    for (int i = 0; i < num_agents(); ++i) tr.next_states[i] = agent_state(i);
    tr.terminal = done();
    out.transition = std::move(tr);
    return out;
}

EpisodeMetrics run_episode(Env& env, int episode, AgentEnsemble& agents, bool train,
                           bool explore, std::vector<StepOutcome>* outcomes) {
    env.set_fast_inner(train);
    env.reset(episode);
    const int n = env.num_agents();
    EpisodeMetrics metrics;
    metrics.agent_returns = Eigen::VectorXd::Zero(n);

    const int train_every = std::max(1, agents.hyperparams().train_every);
    int slot_index = 0;
    while (!env.done()) {
        std::vector<Eigen::VectorXd> actions(n);
        for (int i = 0; i < n; ++i) actions[i] = agents.act(i, env.agent_state(i), explore);
        StepOutcome out = env.step(actions);

        metrics.throughput += out.collected.sum();
        metrics.agent_returns += out.rewards;
        for (auto v : out.violations) metrics.violation_count += v ? 1 : 0;
        metrics.objective_sum += out.objective;
        metrics.collected_history.push_back(out.collected);

        if (train) {
            agents.push(out.transition);
            if (slot_index % train_every == 0) agents.train_step();
        }
        if (outcomes != nullptr) outcomes->push_back(std::move(out));
        ++slot_index;
    }
    metrics.throughput_bits = metrics.throughput / std::numbers::ln2;
    const int slots = env.scenario().slots;
    metrics.mean_reward = metrics.agent_returns.sum() / (static_cast<double>(slots) * n);
    return metrics;
}

AgentEnsemble make_ensemble(const Env& env, const HyperParams& hp, std::uint64_t seed) {
    return AgentEnsemble(env.state_dims(), env.action_dims(), env.optimized_dim(), hp, seed);
}

} // namespace arisim
