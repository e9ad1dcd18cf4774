#pragma once

// Shared helpers for the unit and acceptance suites: random instance
// generators and naive reference implementations kept independent of the
// library's computation paths.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "arisim/channel.hpp"
#include "arisim/geometry.hpp"
#include "arisim/noma.hpp"

namespace testsupport {

using arisim::AssociationMatrix;
using arisim::ChannelConstants;
using arisim::ChannelSet;
using arisim::DecodingOrder;
using arisim::Position;
using arisim::RadioParams;

struct Instance {
    std::vector<Position> uavs;
    Position ris;
    std::vector<Position> gus;
    ChannelConstants constants;
    ChannelSet cs;
    arisim::ReflectionModel model;
};

inline Instance random_instance(std::mt19937_64& gen, int m_count, int k_count, int elements,
                                double area = 400.0, double altitude = 30.0) {
    std::uniform_real_distribution<double> coord(0.0, area);
    Instance inst;
    inst.constants.elements = elements;
    for (int m = 0; m < m_count; ++m) {
        inst.uavs.push_back({coord(gen), coord(gen), altitude});
    }
    inst.ris = {coord(gen), coord(gen), altitude};
    for (int k = 0; k < k_count; ++k) {
        inst.gus.push_back({coord(gen), coord(gen), 0.0});
    }
    inst.cs = arisim::build_channels(inst.uavs, inst.ris, inst.gus, inst.constants, gen());
    inst.model = arisim::ReflectionModel::from_fixed(inst.cs);
    return inst;
}

inline Eigen::VectorXcd random_theta(std::mt19937_64& gen, int length) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    Eigen::VectorXcd theta(length);
    for (int l = 0; l < length; ++l) {
        const double a = angle(gen);
        theta[l] = std::complex<double>(std::cos(a), std::sin(a));
    }
    return theta;
}

// random binary association with at most one UAV per GU
inline AssociationMatrix random_association(std::mt19937_64& gen, int m_count, int k_count) {
    std::uniform_int_distribution<int> pick(0, m_count);  // 0 = unassigned
    AssociationMatrix assoc = AssociationMatrix::zeros(m_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        const int m = pick(gen);
        if (m > 0) assoc.rho(m - 1, k) = 1.0;
    }
    return assoc;
}

// naive equivalent channel: plain complex loop, no library calls
inline std::complex<double> naive_equivalent(const ChannelSet& cs, const Eigen::VectorXcd& theta,
                                             int m, int k) {
    std::complex<double> acc = cs.direct(m, k);
    for (int l = 0; l < cs.elements(); ++l) {
        acc += cs.uav_to_ris[m][l] * cs.ris_to_gu[k][l] * theta[l];
    }
    return acc;
}

// naive SIC interference bookkeeping, term by term
inline Eigen::MatrixXd naive_sinr(const Eigen::MatrixXcd& equivalent,
                                  const AssociationMatrix& assoc, const DecodingOrder& order,
                                  const RadioParams& rp) {
    const int m_count = assoc.num_uavs();
    const int k_count = assoc.num_gus();
    Eigen::MatrixXd sinr = Eigen::MatrixXd::Zero(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        for (int k = 0; k < k_count; ++k) {
            if (assoc.rho(m, k) <= 0.5) continue;
            double intra = 0.0;
            for (int d = 0; d < k_count; ++d) {
                if (assoc.rho(m, d) > 0.5 && order.rank_of(m, d) > order.rank_of(m, k)) {
                    intra += rp.p_g * std::norm(equivalent(m, d));
                }
            }
            double inter = 0.0;
            for (int mp = 0; mp < m_count; ++mp) {
                if (mp == m) continue;
                for (int d = 0; d < k_count; ++d) {
                    if (assoc.rho(mp, d) > 0.5) inter += rp.p_g * std::norm(equivalent(m, d));
                }
            }
            sinr(m, k) =
                rp.p_g * std::norm(equivalent(m, k)) / (intra + inter + rp.sigma2);
        }
    }
    return sinr;
}

} // namespace testsupport
