#include "arisim/queueing.hpp"

#include <algorithm>
#include <stdexcept>

namespace arisim {

QueueState QueueState::empty(int num_gus, double d_max, double arrival_max) {
    QueueState q;
    q.backlog = Eigen::VectorXd::Zero(num_gus);
    q.d_max = d_max;
    q.arrival_max = arrival_max;
    return q;
}

bool QueueState::within_bounds(double tol) const {
    return (backlog.array() >= -tol).all() && (backlog.array() <= d_max + tol).all();
}

QueueStepResult step_queue(const QueueState& q, const Eigen::VectorXd& arrivals,
                           const Eigen::MatrixXd& rates, double tau) {
    const int k_count = static_cast<int>(q.backlog.size());
    if (arrivals.size() != k_count || rates.cols() != k_count) {
        throw std::invalid_argument("step_queue: dimension mismatch");
    }
    const int m_count = static_cast<int>(rates.rows());

    QueueStepResult out;
    out.pre.resize(k_count);
    out.drained.resize(k_count);
    out.collected = Eigen::VectorXd::Zero(m_count);
    out.next = q;

    for (int k = 0; k < k_count; ++k) {
        const double pre = std::min(q.backlog[k] + arrivals[k], q.d_max);
        const double total_rate = rates.col(k).sum();
        const double drained = std::min(tau * total_rate, pre);
        out.pre[k] = pre;
        out.drained[k] = drained;
        out.next.backlog[k] = pre - drained;
        // at most one positive rate per column under the association rule
        for (int m = 0; m < m_count; ++m) {
            if (rates(m, k) > 0.0) out.collected[m] += std::min(tau * rates(m, k), pre);
        }
    }
    return out;
}

double episode_throughput(const std::vector<Eigen::VectorXd>& collected_history) {
    double total = 0.0;
    for (const auto& slot : collected_history) total += slot.sum();
    return total;
}

} // namespace arisim
