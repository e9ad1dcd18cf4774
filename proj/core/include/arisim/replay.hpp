#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "arisim/rng.hpp"

namespace arisim {

// One slot of joint experience. Per-agent views (s_i, (a_l_i, a_o), r_i,
// s'_i) are slices of this record; the optimized action is shared.
struct Transition {
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> learned_actions;
    Eigen::VectorXd optimized_action;
    Eigen::VectorXd rewards;
    std::vector<Eigen::VectorXd> next_states;
    bool terminal = false;
};

// Seeded ring buffer with uniform without-replacement batch sampling.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed);

    void push(Transition t);
    std::size_t size() const { return full_ ? storage_.size() : next_; }
    std::size_t capacity() const { return cap_; }

    // batch distinct transitions, uniformly at random
    std::vector<const Transition*> sample(int batch);

    std::string sampler_state() const { return rng_.save_state(); }
    void set_sampler_state(const std::string& s) { rng_.load_state(s); }

private:
    std::size_t cap_;
    std::vector<Transition> storage_;
    std::vector<int> pool_;  // permutation scratch for sampling
    std::size_t next_ = 0;
    bool full_ = false;
    Rng rng_;
};

} // namespace arisim
