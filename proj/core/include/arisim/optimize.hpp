#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "arisim/channel.hpp"
#include "arisim/noma.hpp"

namespace arisim {

enum class PhaseStrategy { Heuristic, CoordDescent, Oracle };
enum class AssocStrategy { Sca, Oracle };

struct OptimizeConfig {
    PhaseStrategy phase_strategy = PhaseStrategy::CoordDescent;
    AssocStrategy assoc_strategy = AssocStrategy::Sca;
    bool two_step = false;      // association under optimistic channels, one phase solve

    double ao_tol = 1e-4;       // relative objective change that stops the AO loop
    int ao_max_iters = 20;

    double phase_sweep_tol = 1e-6;
    int phase_max_sweeps = 50;
    int phase_scan_points = 64; // coarse scan before the local refine
    int phase_oracle_levels = 8;
    int phase_oracle_max_dim = 6;

    double penalty_tol = 1e-6;  // binariness violation sum(rho - rho^2)
    double kappa_init = 1.0;
    double kappa_growth = 10.0;
    double kappa_max = 1e6;
    int penalty_max_rounds = 20;
    int sca_inner_rounds = 8;   // anchor refreshes per penalty level
    int fw_max_iters = 200;     // conditional-gradient iterations per round
    double fw_tol = 1e-8;       // stop on this duality-gap estimate

    int assoc_oracle_max_gus = 10;
    int assoc_oracle_max_uavs = 3;

    std::ostream* trace = nullptr;  // per-iteration solver log, one line per record
};

// Rank-one lifting of the per-pair equivalent channel: trace_term(m,k,Phi)
// with Phi = [theta;1][theta;1]^H reproduces |cascade.theta + direct|^2.
struct LiftedProblem {
    std::vector<std::vector<Eigen::MatrixXcd>> q;  // [m][k], (dim+1)x(dim+1) Hermitian PSD
    RadioParams radio;
    std::vector<std::uint8_t> active;
    int dim = 0;

    int num_uavs() const { return static_cast<int>(q.size()); }
    int num_gus() const { return q.empty() ? 0 : static_cast<int>(q[0].size()); }

    static Eigen::MatrixXcd lift(const Eigen::VectorXcd& theta);  // [theta;1][theta;1]^H

    double trace_term(int m, int k, const Eigen::MatrixXcd& phi) const;
    // received powers p_g * Tr(Q_{m,k} Phi) for all pairs
    Eigen::MatrixXd powers(const Eigen::MatrixXcd& phi) const;

    // per-UAV rate of the lifted objective under a (possibly relaxed) rho
    double rate(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho, int m) const;
    double sum_rate(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho) const;

    // rate with the subtracted log replaced by its tangent at anchor ell0;
    // minorizes `rate` and touches it at the anchor
    double rate_linearized(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho,
                           int m, double ell0) const;

    // convexified SIC-threshold residuals, nonnegative iff the constraint
    // holds; one entry per associated pair of the binary assoc
    std::vector<double> sinr_residuals(const Eigen::MatrixXcd& phi,
                                       const AssociationMatrix& assoc,
                                       const DecodingOrder& order) const;
};

LiftedProblem build_lifted(const ReflectionModel& model, const RadioParams& rp);

// Diagonal-one Hermitian PSD check for lifted phase matrices.
bool valid_phase_matrix(const Eigen::MatrixXcd& phi, double tol = 1e-8);

// Passive beamforming for a fixed binary association.
//  Heuristic    - co-phase every element with the strongest associated link.
//  CoordDescent - cyclic exact single-element maximization of the sum rate.
//  Oracle       - exhaustive search over discretized phases, small dim only.
PhaseShiftVector solve_phases(const ReflectionModel& model, const AssociationMatrix& assoc,
                              const RadioParams& rp, PhaseStrategy strategy,
                              const OptimizeConfig& cfg = {});

// GU association for fixed phases. The SCA path relaxes rho, drives it
// binary with an increasing penalty, rounds, and repairs the SIC threshold
// by dropping the lowest-rate violating GU until all pass; it maximizes the
// unclamped rate surrogate. The oracle enumerates every assignment (each
// GU: one active UAV or none) and, when backlogs are supplied (one per GU),
// scores assignments by the queue-capped collected data.
AssociationMatrix solve_association(const ReflectionModel& model, const PhaseShiftVector& theta,
                                    const RadioParams& rp, const Eigen::VectorXd& backlogs,
                                    AssocStrategy strategy, const OptimizeConfig& cfg = {});

// Same solvers on a precomputed received-power matrix p_g*|h|^2; used for
// the optimistic two-step pass and by the tests.
AssociationMatrix solve_association_on_power(const Eigen::MatrixXd& power,
                                             const Eigen::MatrixXd& surrogate_norm,
                                             const std::vector<std::uint8_t>& active,
                                             const RadioParams& rp, AssocStrategy strategy,
                                             const OptimizeConfig& cfg = {},
                                             const Eigen::VectorXd& backlogs = {});

struct AoResult {
    PhaseShiftVector theta;
    AssociationMatrix assoc;
    double objective = 0.0;                // sum of log(1+SINR), nats
    double objective_clamped = 0.0;        // same, capped by queue backlogs
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_history; // incumbent value per iteration
};

// Alternating optimization of phases and association. Keeps the incumbent
// best pair, so the reported objective never decreases across iterations.
// With cfg.two_step, association is solved once under optimistic channels
// followed by a single phase solve.
AoResult alternate_optimize(const ReflectionModel& model, const RadioParams& rp,
                            const Eigen::VectorXd& backlogs, const OptimizeConfig& cfg = {});

} // namespace arisim
