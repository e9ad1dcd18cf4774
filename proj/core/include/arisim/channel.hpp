#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "arisim/geometry.hpp"

namespace arisim {

struct ChannelConstants {
    double beta = 1e-3;          // channel power gain at 1 m, linear (-30 dB)
    double alpha0 = 2.2;         // path loss exponent
    bool rician_fading = false;  // fading on UAV-GU direct links
    double rician_k = 10.0;      // linear Rician factor, used when fading is on
    int elements = 30;           // reflecting elements per surface, L
    double spacing_ratio = 0.5;  // element spacing over wavelength
    double min_distance = 1e-3;  // link-distance floor; platforms may overlap
                                 // after boundary clipping and must not blow up
};

// beta * d^-alpha0. Throws on d <= 0; platforms never co-locate given d_min.
double pathloss_gain(double d, const ChannelConstants& c);

// Unit-modulus reflection coefficients of one surface.
struct PhaseShiftVector {
    Eigen::VectorXcd theta;

    static PhaseShiftVector all_ones(int length);
    static PhaseShiftVector from_angles(const Eigen::VectorXd& angles);
    int size() const { return static_cast<int>(theta.size()); }
    bool unit_modulus(double tol = 1e-9) const;
    // snap every coefficient back to the unit circle (zero entries become 1)
    void renormalize();
};

// All channel gains for one slot of the fixed-reflector layout: direct
// UAV-GU scalars plus the two legs of every reflected path.
struct ChannelSet {
    Eigen::MatrixXcd direct;                    // M x K
    std::vector<Eigen::VectorXcd> uav_to_ris;   // size M, each length L
    std::vector<Eigen::VectorXcd> ris_to_gu;    // size K, each length L

    int num_uavs() const { return static_cast<int>(direct.rows()); }
    int num_gus() const { return static_cast<int>(direct.cols()); }
    int elements() const { return uav_to_ris.empty() ? 0 : static_cast<int>(uav_to_ris[0].size()); }

    // element-wise product of the two legs of the reflected path
    Eigen::VectorXcd cascade(int m, int k) const;
};

// Deterministic per seed. Vector links carry a uniform-linear-array phase
// ramp from the geometry; fading (when enabled) perturbs UAV-GU links only.
ChannelSet build_channels(std::span<const Position> uavs, const Position& ris,
                          std::span<const Position> gus, const ChannelConstants& c,
                          std::uint64_t seed);

// cascade(m,k) . theta + direct(m,k)
std::complex<double> equivalent_channel(const ChannelSet& cs, const PhaseShiftVector& theta,
                                        int m, int k);

// sum_l |cascade_l| + |direct|: the channel magnitude when every reflected
// element is co-phased with the direct path. Upper bound over all theta.
double optimistic_norm(const ChannelSet& cs, int m, int k);

// Channel gains for the dual-mode layout, where every UAV carries both a
// surface and a transceiver. inter_uav[m][m'] is the link from UAV m' 's
// surface to the receiver of UAV m; surface_to_gu[m'][k] is the link from
// that surface down to GU k.
struct DualChannelSet {
    Eigen::MatrixXcd direct;                                  // M x K
    std::vector<std::vector<Eigen::VectorXcd>> inter_uav;     // [m][m'], empty on diagonal
    std::vector<std::vector<Eigen::VectorXcd>> surface_to_gu; // [m'][k]

    int num_uavs() const { return static_cast<int>(direct.rows()); }
    int num_gus() const { return static_cast<int>(direct.cols()); }
    int elements() const;
};

DualChannelSet build_dual_channels(std::span<const Position> uavs,
                                   std::span<const Position> gus,
                                   const ChannelConstants& c, std::uint64_t seed);

// Equivalent channel seen by active UAV m from GU k, with every passive
// UAV (modes[m']=0) contributing a reflected path. Evaluated through the
// stacked cascade/phase form. modes[m] must be 1 (the receiver is active);
// thetas holds one phase vector per UAV, entries of active UAVs are inert.
std::complex<double> dualmode_channel(const DualChannelSet& dcs, const std::vector<int>& modes,
                                      const std::vector<PhaseShiftVector>& thetas, int m, int k);

// Uniform "stacked cascade + direct" view consumed by the solvers. Both
// layouts reduce to it: the fixed layout stacks a single surface, the
// dual-mode layout stacks all surfaces with active segments zeroed.
struct ReflectionModel {
    Eigen::MatrixXcd direct;                             // M x K
    std::vector<std::vector<Eigen::VectorXcd>> cascade;  // [m][k], shared length
    std::vector<std::uint8_t> active;                    // receivers that may serve GUs

    int num_uavs() const { return static_cast<int>(direct.rows()); }
    int num_gus() const { return static_cast<int>(direct.cols()); }
    int dim() const;  // stacked phase dimension (0 when no surface)

    std::complex<double> equivalent_gain(const Eigen::VectorXcd& theta, int m, int k) const;
    Eigen::MatrixXcd equivalent_gains(const Eigen::VectorXcd& theta) const;
    double optimistic_norm(int m, int k) const;
    Eigen::MatrixXd optimistic_norms() const;

    static ReflectionModel from_fixed(const ChannelSet& cs);
    static ReflectionModel from_dual(const DualChannelSet& dcs, const std::vector<int>& modes);
    static ReflectionModel direct_only(const Eigen::MatrixXcd& direct);
};

} // namespace arisim
