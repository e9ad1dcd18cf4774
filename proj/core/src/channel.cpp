#include "arisim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arisim/rng.hpp"

namespace arisim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Complex = std::complex<double>;

Complex unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Carrier phase accumulated over the link; distances are expressed in
// element spacings, so spacing_ratio converts them to wavelengths.
Complex carrier(double d, const ChannelConstants& c) {
    return unit_phase(-kTwoPi * c.spacing_ratio * d);
}

// L-element link whose array sits at `array_pos`. ULA along the x axis;
// the ramp is driven by the direction cosine toward the far end.
Eigen::VectorXcd vector_link(const Position& array_pos, const Position& other,
                             const ChannelConstants& c) {
    const double d = std::max(distance(array_pos, other), c.min_distance);
    const double amp = std::sqrt(pathloss_gain(d, c));
    const double cos_phi = (other.x - array_pos.x) / d;
    const Complex base = amp * carrier(d, c);
    Eigen::VectorXcd out(c.elements);
    for (int l = 0; l < c.elements; ++l) {
        out[l] = base * unit_phase(-kTwoPi * c.spacing_ratio * l * cos_phi);
    }
    return out;
}

// Single-antenna air-to-ground link, optionally Rician faded.
Complex scalar_link(const Position& a, const Position& b, const ChannelConstants& c,
                    Rng* fading_rng) {
    const double d = std::max(distance(a, b), c.min_distance);
    const double amp = std::sqrt(pathloss_gain(d, c));
    Complex h = amp * carrier(d, c);
    if (fading_rng != nullptr) {
        const double k = c.rician_k;
        const Complex scatter(fading_rng->normal() / std::numbers::sqrt2,
                              fading_rng->normal() / std::numbers::sqrt2);
        h = h * std::sqrt(k / (k + 1.0)) + amp * scatter * std::sqrt(1.0 / (k + 1.0));
    }
    return h;
}

Eigen::MatrixXcd build_direct(std::span<const Position> uavs, std::span<const Position> gus,
                              const ChannelConstants& c, std::uint64_t seed) {
    const int m_count = static_cast<int>(uavs.size());
    const int k_count = static_cast<int>(gus.size());
    Eigen::MatrixXcd direct(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        for (int k = 0; k < k_count; ++k) {
            if (c.rician_fading) {
                // one substream per link keeps draws independent of iteration order
                Rng rng(substream_seed(seed, "fade", static_cast<std::uint64_t>(m),
                                       static_cast<std::uint64_t>(k)));
                direct(m, k) = scalar_link(uavs[m], gus[k], c, &rng);
            } else {
                direct(m, k) = scalar_link(uavs[m], gus[k], c, nullptr);
            }
        }
    }
    return direct;
}

} // namespace

double pathloss_gain(double d, const ChannelConstants& c) {
    if (d <= 0.0) throw std::domain_error("pathloss_gain: distance must be positive");
    return c.beta * std::pow(d, -c.alpha0);
}

PhaseShiftVector PhaseShiftVector::all_ones(int length) {
    PhaseShiftVector v;
    v.theta = Eigen::VectorXcd::Ones(length);
    return v;
}

PhaseShiftVector PhaseShiftVector::from_angles(const Eigen::VectorXd& angles) {
    PhaseShiftVector v;
    v.theta.resize(angles.size());
    for (Eigen::Index i = 0; i < angles.size(); ++i) v.theta[i] = unit_phase(angles[i]);
    return v;
}

bool PhaseShiftVector::unit_modulus(double tol) const {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (std::abs(std::abs(theta[i]) - 1.0) > tol) return false;
    }
    return true;
}

void PhaseShiftVector::renormalize() {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double mag = std::abs(theta[i]);
        theta[i] = mag > 0.0 ? theta[i] / mag : Complex(1.0, 0.0);
    }
}

Eigen::VectorXcd ChannelSet::cascade(int m, int k) const {
    return uav_to_ris[m].cwiseProduct(ris_to_gu[k]);
}

ChannelSet build_channels(std::span<const Position> uavs, const Position& ris,
                          std::span<const Position> gus, const ChannelConstants& c,
                          std::uint64_t seed) {
    ChannelSet cs;
    cs.direct = build_direct(uavs, gus, c, seed);
    cs.uav_to_ris.reserve(uavs.size());
    for (const Position& q : uavs) cs.uav_to_ris.push_back(vector_link(ris, q, c));
    cs.ris_to_gu.reserve(gus.size());
    for (const Position& z : gus) cs.ris_to_gu.push_back(vector_link(ris, z, c));
    return cs;
}

std::complex<double> equivalent_channel(const ChannelSet& cs, const PhaseShiftVector& theta,
                                        int m, int k) {
    return cs.cascade(m, k).cwiseProduct(theta.theta).sum() + cs.direct(m, k);
}

double optimistic_norm(const ChannelSet& cs, int m, int k) {
    return cs.cascade(m, k).cwiseAbs().sum() + std::abs(cs.direct(m, k));
}

int DualChannelSet::elements() const {
    for (const auto& row : surface_to_gu) {
        for (const auto& v : row) {
            if (v.size() > 0) return static_cast<int>(v.size());
        }
    }
    return 0;
}

DualChannelSet build_dual_channels(std::span<const Position> uavs,
                                   std::span<const Position> gus,
                                   const ChannelConstants& c, std::uint64_t seed) {
    const int m_count = static_cast<int>(uavs.size());
    const int k_count = static_cast<int>(gus.size());
    DualChannelSet dcs;
    dcs.direct = build_direct(uavs, gus, c, seed);
    dcs.inter_uav.assign(m_count, std::vector<Eigen::VectorXcd>(m_count));
    dcs.surface_to_gu.assign(m_count, std::vector<Eigen::VectorXcd>(k_count));
    for (int s = 0; s < m_count; ++s) {
        for (int m = 0; m < m_count; ++m) {
            if (m != s) dcs.inter_uav[m][s] = vector_link(uavs[s], uavs[m], c);
        }
        for (int k = 0; k < k_count; ++k) {
            dcs.surface_to_gu[s][k] = vector_link(uavs[s], gus[k], c);
        }
    }
    return dcs;
}

std::complex<double> dualmode_channel(const DualChannelSet& dcs, const std::vector<int>& modes,
                                      const std::vector<PhaseShiftVector>& thetas, int m, int k) {
    const int m_count = dcs.num_uavs();
    if (m < 0 || m >= m_count) throw std::out_of_range("dualmode_channel: bad receiver index");
    if (static_cast<int>(modes.size()) != m_count ||
        static_cast<int>(thetas.size()) != m_count) {
        throw std::invalid_argument("dualmode_channel: modes/thetas must have one entry per UAV");
    }
    if (modes[m] == 0) {
        throw std::invalid_argument("dualmode_channel: receiver is passive and has no receive chain");
    }
    const int l = dcs.elements();
    // stacked cascade over all surfaces; active segments vanish, so the
    // concatenated inner product reduces to a sum of per-surface terms
    std::complex<double> acc = 0.0;
    for (int s = 0; s < m_count; ++s) {
        if (s == m || modes[s] != 0) continue;
        if (thetas[s].theta.size() != l) {
            throw std::invalid_argument("dualmode_channel: phase vector length mismatch");
        }
        acc += dcs.inter_uav[m][s]
                   .cwiseProduct(dcs.surface_to_gu[s][k])
                   .cwiseProduct(thetas[s].theta)
                   .sum();
    }
    return acc + dcs.direct(m, k);
}

int ReflectionModel::dim() const {
    for (const auto& row : cascade) {
        for (const auto& v : row) {
            if (v.size() > 0) return static_cast<int>(v.size());
        }
    }
    return 0;
}

std::complex<double> ReflectionModel::equivalent_gain(const Eigen::VectorXcd& theta,
                                                      int m, int k) const {
    const auto& c = cascade[m][k];
    if (c.size() == 0) return direct(m, k);
    return c.cwiseProduct(theta).sum() + direct(m, k);
}

Eigen::MatrixXcd ReflectionModel::equivalent_gains(const Eigen::VectorXcd& theta) const {
    Eigen::MatrixXcd out(num_uavs(), num_gus());
    for (int m = 0; m < num_uavs(); ++m) {
        for (int k = 0; k < num_gus(); ++k) out(m, k) = equivalent_gain(theta, m, k);
    }
    return out;
}

double ReflectionModel::optimistic_norm(int m, int k) const {
    const auto& c = cascade[m][k];
    const double reflected = c.size() == 0 ? 0.0 : c.cwiseAbs().sum();
    return reflected + std::abs(direct(m, k));
}

Eigen::MatrixXd ReflectionModel::optimistic_norms() const {
    Eigen::MatrixXd out(num_uavs(), num_gus());
    for (int m = 0; m < num_uavs(); ++m) {
        for (int k = 0; k < num_gus(); ++k) out(m, k) = optimistic_norm(m, k);
    }
    return out;
}

ReflectionModel ReflectionModel::from_fixed(const ChannelSet& cs) {
    ReflectionModel model;
    model.direct = cs.direct;
    model.cascade.assign(cs.num_uavs(), std::vector<Eigen::VectorXcd>(cs.num_gus()));
    for (int m = 0; m < cs.num_uavs(); ++m) {
        for (int k = 0; k < cs.num_gus(); ++k) model.cascade[m][k] = cs.cascade(m, k);
    }
    model.active.assign(cs.num_uavs(), 1);
    return model;
}

ReflectionModel ReflectionModel::from_dual(const DualChannelSet& dcs,
                                           const std::vector<int>& modes) {
    const int m_count = dcs.num_uavs();
    const int k_count = dcs.num_gus();
    if (static_cast<int>(modes.size()) != m_count) {
        throw std::invalid_argument("ReflectionModel::from_dual: one mode per UAV required");
    }
    const int l = dcs.elements();
    ReflectionModel model;
    model.direct = dcs.direct;
    model.cascade.assign(m_count, std::vector<Eigen::VectorXcd>(k_count));
    model.active.assign(m_count, 0);
    for (int m = 0; m < m_count; ++m) {
        model.active[m] = modes[m] != 0 ? 1 : 0;
        for (int k = 0; k < k_count; ++k) {
            Eigen::VectorXcd row = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(l) * m_count);
            if (modes[m] != 0) {
                for (int s = 0; s < m_count; ++s) {
                    if (s == m || modes[s] != 0) continue;
                    row.segment(static_cast<Eigen::Index>(s) * l, l) =
                        dcs.inter_uav[m][s].cwiseProduct(dcs.surface_to_gu[s][k]);
                }
            }
            model.cascade[m][k] = std::move(row);
        }
    }
    return model;
}

ReflectionModel ReflectionModel::direct_only(const Eigen::MatrixXcd& direct) {
    ReflectionModel model;
    model.direct = direct;
    model.cascade.assign(direct.rows(), std::vector<Eigen::VectorXcd>(direct.cols()));
    model.active.assign(direct.rows(), 1);
    return model;
}

} // namespace arisim
