#pragma once

#include <vector>

#include <Eigen/Dense>

namespace arisim {

enum class SchemeKind { FixedAris, DmSwitching, AllActive };
enum class AccessKind { Noma, Tdma, Fdma };

struct RewardWeights {
    double l_u = 1.0;   // data-collection weight
    double l_r = 1.0;   // channel-improvement weight
    double j_u = 10.0;  // constraint penalty, collecting agents
    double j_r = 10.0;  // constraint penalty, reflecting agents
};

// Per-slot quantities the reward rules consume. `collect` is the queue-capped
// data per UAV; `improvement` is the magnitude of the reflected channel summed
// over associated pairs, one entry per reflecting platform (a single entry in
// the fixed layout, one per UAV in dual mode).
struct RewardInputs {
    SchemeKind scheme = SchemeKind::FixedAris;
    Eigen::VectorXd collect;
    Eigen::VectorXd improvement;
    std::vector<std::uint8_t> violation;  // per agent
    std::vector<int> modes;               // dual mode only
};

// One reward per agent. Dual-mode agents blend the collecting and reflecting
// rewards through their mode bit, so the reward is exactly the active-mode
// reward when the mode is 1 and exactly the passive one when it is 0.
Eigen::VectorXd compute_rewards(const RewardInputs& in, const RewardWeights& w);

} // namespace arisim
