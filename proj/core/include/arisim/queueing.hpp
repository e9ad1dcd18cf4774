#pragma once

#include <vector>

#include <Eigen/Dense>

namespace arisim {

// Per-GU sensing buffers. Backlogs stay inside [0, d_max] by construction.
struct QueueState {
    Eigen::VectorXd backlog;   // data units per GU
    double d_max = 50.0;       // buffer capacity
    double arrival_max = 10.0; // upper bound of the uniform arrival draw

    static QueueState empty(int num_gus, double d_max, double arrival_max);
    bool within_bounds(double tol = 0.0) const;
};

struct QueueStepResult {
    QueueState next;
    Eigen::VectorXd pre;        // backlog after arrival, clamped to d_max
    Eigen::VectorXd drained;    // data removed per GU
    Eigen::VectorXd collected;  // data received per UAV
};

// One slot of buffer dynamics: admit arrivals up to capacity, then drain
// min(tau * rate, available). At most one UAV serves each GU, so the per-UAV
// split and the per-GU total coincide.
QueueStepResult step_queue(const QueueState& q, const Eigen::VectorXd& arrivals,
                           const Eigen::MatrixXd& rates, double tau);

// Total data units collected over an episode.
double episode_throughput(const std::vector<Eigen::VectorXd>& collected_history);

} // namespace arisim
