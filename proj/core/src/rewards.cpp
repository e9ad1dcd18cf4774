#include "arisim/rewards.hpp"

#include <stdexcept>

namespace arisim {

Eigen::VectorXd compute_rewards(const RewardInputs& in, const RewardWeights& w) {
    const int m_count = static_cast<int>(in.collect.size());
    switch (in.scheme) {
        case SchemeKind::FixedAris: {
            // one agent per UAV plus the reflector agent
            Eigen::VectorXd r(m_count + 1);
            for (int m = 0; m < m_count; ++m) {
                r[m] = w.l_u * in.collect[m] - (in.violation[m] ? w.j_u : 0.0);
            }
            r[m_count] = w.l_r * in.improvement[0] - (in.violation[m_count] ? w.j_r : 0.0);
            return r;
        }
        case SchemeKind::AllActive: {
            Eigen::VectorXd r(m_count);
            for (int m = 0; m < m_count; ++m) {
                r[m] = w.l_u * in.collect[m] - (in.violation[m] ? w.j_u : 0.0);
            }
            return r;
        }
        case SchemeKind::DmSwitching: {
            if (static_cast<int>(in.modes.size()) != m_count) {
                throw std::invalid_argument("compute_rewards: one mode per UAV required");
            }
            Eigen::VectorXd r(m_count);
            for (int m = 0; m < m_count; ++m) {
                const double active_r = w.l_u * in.collect[m] - (in.violation[m] ? w.j_u : 0.0);
                const double passive_r =
                    w.l_r * in.improvement[m] - (in.violation[m] ? w.j_r : 0.0);
                r[m] = in.modes[m] != 0 ? active_r : passive_r;
            }
            return r;
        }
    }
    throw std::logic_error("compute_rewards: unknown scheme");
}

} // namespace arisim
