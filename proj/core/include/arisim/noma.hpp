#pragma once

#include <vector>

#include <Eigen/Dense>

namespace arisim {

// GU-to-UAV assignment. Binary in executed slots; the association solver
// relaxes entries to [0,1] internally.
struct AssociationMatrix {
    Eigen::MatrixXd rho;  // M x K
    bool binary = true;

    static AssociationMatrix zeros(int num_uavs, int num_gus, bool binary = true);
    int num_uavs() const { return static_cast<int>(rho.rows()); }
    int num_gus() const { return static_cast<int>(rho.cols()); }

    // each GU transmits to at most one UAV
    bool unique_assignment(double tol = 1e-9) const;
    // serving UAV of GU k, -1 when unassigned (binary mode)
    int serving_uav(int k) const;
    // associated GU indices of UAV m (binary mode)
    std::vector<int> group(int m) const;
    int group_size(int m) const;
};

// Per-UAV SIC decoding order, strongest surrogate channel first.
struct DecodingOrder {
    std::vector<std::vector<int>> order;  // [m] -> GU indices, rank 1 first
    std::vector<std::vector<int>> rank;   // [m][k] -> 1..D_m, 0 if not in group

    int rank_of(int m, int k) const { return rank[m][k]; }
};

struct RadioParams {
    double p_g = 1.0;        // GU transmit power, W (30 dBm)
    double sigma2 = 1e-12;   // noise power, W (-90 dBm)
    double gamma = 0.1;      // linear SIC decoding threshold
};

// Sort each UAV's group by descending squared surrogate norm, ties broken
// by ascending GU index. surrogate_norm is M x K (optimistic norms).
DecodingOrder decode_order(const Eigen::MatrixXd& surrogate_norm, const AssociationMatrix& assoc);

// SINR per (m,k) with intra-UAV interference from later-decoded GUs of the
// same group and inter-UAV interference from every GU of other UAVs.
// Unassociated pairs get 0.
Eigen::MatrixXd compute_sinr(const Eigen::MatrixXcd& equivalent, const AssociationMatrix& assoc,
                             const DecodingOrder& order, const RadioParams& rp);

// Same computation from precomputed received powers p_g*|h|^2 (M x K).
Eigen::MatrixXd compute_sinr_from_power(const Eigen::MatrixXd& power,
                                        const AssociationMatrix& assoc,
                                        const DecodingOrder& order, const RadioParams& rp);

struct RateReport {
    Eigen::MatrixXd rates;                          // nats per slot-Hz
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> feasible;  // SINR >= gamma
};

// log(1+SINR) per associated pair; feasibility mask at the threshold is
// inclusive. Infeasible pairs keep their rate here; the caller voids them.
RateReport rates_and_feasibility(const Eigen::MatrixXd& sinr, const AssociationMatrix& assoc,
                                 const RadioParams& rp);

// Sum over associated pairs of log(1+SINR).
double sum_rate(const Eigen::MatrixXd& sinr, const AssociationMatrix& assoc);

enum class AccessScheme { Tdma, Fdma };

struct OmaReport {
    Eigen::MatrixXd rates;  // nats per slot-Hz, already scaled by 1/D_m
    Eigen::MatrixXd sinr;   // effective per-GU SINR inside the log
};

// Orthogonal baselines: the slot (TDMA) or band (FDMA) of each UAV is split
// equally among its D_m GUs; no intra-UAV interference in either scheme.
OmaReport oma_baseline_rates(const Eigen::MatrixXcd& equivalent, const AssociationMatrix& assoc,
                             const RadioParams& rp, AccessScheme scheme);

} // namespace arisim
