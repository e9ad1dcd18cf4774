#pragma once

#include <vector>

#include "arisim/agent.hpp"
#include "arisim/channel.hpp"
#include "arisim/queueing.hpp"
#include "arisim/replay.hpp"
#include "arisim/rewards.hpp"
#include "arisim/scenario.hpp"

namespace arisim {

// Everything observable about one executed slot.
struct StepOutcome {
    int slot = 0;
    std::vector<Position> positions;   // platforms after the move
    std::vector<int> modes;            // per UAV; all ones outside dual mode
    Eigen::VectorXcd theta;            // executed stacked phases (empty without surfaces)
    AssociationMatrix assoc;           // solved association
    Eigen::MatrixXd sinr;              // executed SINR
    Eigen::MatrixXd rates;             // executed rates, threshold violations zeroed
    Eigen::VectorXd arrivals;
    Eigen::VectorXd pre_backlog;       // after arrival clamp, before drain
    Eigen::VectorXd backlog_after;
    Eigen::VectorXd collected;         // per UAV, queue-capped data
    Eigen::VectorXd rewards;           // per agent
    std::vector<std::uint8_t> violations;  // per agent
    double objective = 0.0;            // inner-solver objective (sum rate)
    RewardInputs reward_inputs;        // inputs the rewards were computed from
    Transition transition;             // joint experience record for this slot
};

// Episodic environment for all three schemes: move, decode modes, run the
// inner optimization, execute the slot, update queues, score rewards.
class Env {
public:
    explicit Env(const Scenario& sc);

    void reset(int episode);

    int num_agents() const;
    std::vector<int> state_dims() const;
    std::vector<int> action_dims() const;
    int optimized_dim() const;

    Eigen::VectorXd agent_state(int i) const;
    StepOutcome step(const std::vector<Eigen::VectorXd>& learned_actions);

    bool done() const { return slot_ >= sc_.slots; }
    int slot() const { return slot_; }
    const Scenario& scenario() const { return sc_; }
    const QueueState& queue() const { return queue_; }
    const std::vector<Position>& platform_positions() const { return platforms_; }
    const std::vector<Position>& gu_positions() const { return gus_; }

    // two-step inner solver (training) vs full alternating optimization
    void set_fast_inner(bool fast) { fast_inner_ = fast; }

private:
    int num_platforms() const;
    void refresh_channels(std::uint64_t seed);
    Eigen::VectorXd channel_feature(int agent) const;
    Eigen::VectorXd optimized_features(const std::vector<int>& modes,
                                       const Eigen::VectorXcd& theta,
                                       const AssociationMatrix& assoc) const;
    OptimizeConfig inner_config() const;

    Scenario sc_;
    int episode_ = 0;
    int slot_ = 0;
    bool fast_inner_ = true;
    std::vector<Position> platforms_;  // UAVs, plus the reflector last in fixed layout
    std::vector<Position> gus_;
    QueueState queue_;
    // channels at the current geometry, observed by agent states
    ChannelSet fixed_cs_;
    DualChannelSet dual_cs_;
    double norm_feature_hi_ = 0.0;     // log-scale anchors for channel features
    double norm_feature_lo_ = 0.0;
};

struct EpisodeMetrics {
    double throughput = 0.0;        // data units (nats)
    double throughput_bits = 0.0;
    Eigen::VectorXd agent_returns;  // per agent, undiscounted
    double mean_reward = 0.0;       // per agent per slot
    int violation_count = 0;
    double objective_sum = 0.0;     // inner-solver objectives over the episode
    std::vector<Eigen::VectorXd> collected_history;
};

// Roll one episode. With train=true, transitions are stored and a gradient
// step runs every hyperparams.train_every slots once the buffer is warm.
EpisodeMetrics run_episode(Env& env, int episode, AgentEnsemble& agents, bool train,
                           bool explore,
                           std::vector<StepOutcome>* outcomes = nullptr);

// Agent ensemble matching the environment's spaces.
AgentEnsemble make_ensemble(const Env& env, const HyperParams& hp, std::uint64_t seed);

} // namespace arisim
