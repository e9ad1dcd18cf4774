#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arisim/mlp.hpp"
#include "arisim/replay.hpp"

namespace arisim {

struct HyperParams {
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double gamma_d = 0.95;        // reward discount
    double tau_soft = 0.01;       // target soft-update rate
    int batch_size = 256;
    double epsilon = 0.1;         // epsilon-greedy coefficient
    double noise_scale = 0.1;     // Gaussian exploration, action-box units
    std::vector<int> hidden{128, 128};
    std::size_t buffer_capacity = 500000;
    int warmup = 0;               // transitions before training; 0 -> batch_size
    int train_every = 1;          // slots between gradient steps
};

struct TrainDiagnostics {
    bool trained = false;
    double critic_loss = 0.0;   // mean squared TD error, averaged over agents
    double policy_value = 0.0;  // mean critic value of the current policies
};

// Deterministic actors with centralized critics. Critics see every agent's
// state and action plus the optimized-action features; actors see only their
// own state. Actions live in [-1,1]^d.
class AgentEnsemble {
public:
    AgentEnsemble(const std::vector<int>& state_dims, const std::vector<int>& action_dims,
                  int optimized_dim, const HyperParams& hp, std::uint64_t seed);

    int num_agents() const { return static_cast<int>(actors_.size()); }
    int state_dim(int i) const { return state_dims_[i]; }
    int action_dim(int i) const { return action_dims_[i]; }
    int optimized_dim() const { return optimized_dim_; }

    // Deterministic policy output; with explore, epsilon-greedy resampling or
    // additive Gaussian noise, clipped to the box.
    Eigen::VectorXd act(int i, const Eigen::VectorXd& state, bool explore);

    void push(Transition t) { buffer_.push(std::move(t)); }
    std::size_t buffer_size() const { return buffer_.size(); }
    bool warm() const;

    // One critic regression + one policy-gradient ascent step per agent on a
    // shared uniformly sampled batch, then a soft target update. No-op with
    // a diagnostic when the buffer is not yet warm.
    TrainDiagnostics train_step();

    // target <- (1-tau)*target + tau*online
    void soft_update(double tau);

    void save_checkpoint(std::ostream& os) const;
    void load_checkpoint(std::istream& is);
    void save_checkpoint_file(const std::string& path) const;
    void load_checkpoint_file(const std::string& path);

    Mlp& actor(int i) { return actors_[i]; }
    Mlp& critic(int i) { return critics_[i]; }
    Mlp& target_actor(int i) { return target_actors_[i]; }
    Mlp& target_critic(int i) { return target_critics_[i]; }
    const HyperParams& hyperparams() const { return hp_; }
    ReplayBuffer& buffer() { return buffer_; }

private:
    HyperParams hp_;
    std::vector<int> state_dims_, action_dims_;
    int optimized_dim_ = 0;
    std::vector<Mlp> actors_, critics_, target_actors_, target_critics_;
    std::vector<Adam> actor_opts_, critic_opts_;
    std::vector<Rng> explore_rngs_;
    ReplayBuffer buffer_;
};

} // namespace arisim
