#include "arisim/noma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arisim {

AssociationMatrix AssociationMatrix::zeros(int num_uavs, int num_gus, bool binary) {
    AssociationMatrix a;
    a.rho = Eigen::MatrixXd::Zero(num_uavs, num_gus);
    a.binary = binary;
    return a;
}

bool AssociationMatrix::unique_assignment(double tol) const {
    for (int k = 0; k < num_gus(); ++k) {
        if (rho.col(k).sum() > 1.0 + tol) return false;
    }
    return true;
}

int AssociationMatrix::serving_uav(int k) const {
    for (int m = 0; m < num_uavs(); ++m) {
        if (rho(m, k) > 0.5) return m;
    }
    return -1;
}

std::vector<int> AssociationMatrix::group(int m) const {
    std::vector<int> gus;
    for (int k = 0; k < num_gus(); ++k) {
        if (rho(m, k) > 0.5) gus.push_back(k);
    }
    return gus;
}

int AssociationMatrix::group_size(int m) const {
    int n = 0;
    for (int k = 0; k < num_gus(); ++k) {
        if (rho(m, k) > 0.5) ++n;
    }
    return n;
}

DecodingOrder decode_order(const Eigen::MatrixXd& surrogate_norm, const AssociationMatrix& assoc) {
    if (!assoc.binary) throw std::invalid_argument("decode_order: association must be binary");
    const int m_count = assoc.num_uavs();
    const int k_count = assoc.num_gus();
    DecodingOrder order;
    order.order.resize(m_count);
    order.rank.assign(m_count, std::vector<int>(k_count, 0));
    for (int m = 0; m < m_count; ++m) {
        std::vector<int> group = assoc.group(m);
        std::stable_sort(group.begin(), group.end(), [&](int a, int b) {
            const double ga = surrogate_norm(m, a) * surrogate_norm(m, a);
            const double gb = surrogate_norm(m, b) * surrogate_norm(m, b);
            if (ga != gb) return ga > gb;
            return a < b;
        });
        order.order[m] = group;
        for (std::size_t r = 0; r < group.size(); ++r) {
            order.rank[m][group[r]] = static_cast<int>(r) + 1;
        }
    }
    return order;
}

Eigen::MatrixXd compute_sinr_from_power(const Eigen::MatrixXd& power,
                                        const AssociationMatrix& assoc,
                                        const DecodingOrder& order, const RadioParams& rp) {
    if (!assoc.binary) throw std::invalid_argument("compute_sinr: association must be binary");
    const int m_count = assoc.num_uavs();
    const int k_count = assoc.num_gus();
    Eigen::MatrixXd sinr = Eigen::MatrixXd::Zero(m_count, k_count);

    // inter-UAV interference at receiver m: every GU served by another UAV,
    // weighted by the receiver's own channel to that GU
    Eigen::VectorXd inter = Eigen::VectorXd::Zero(m_count);
    for (int m = 0; m < m_count; ++m) {
        double acc = 0.0;
        for (int mp = 0; mp < m_count; ++mp) {
            if (mp == m) continue;
            for (int k = 0; k < k_count; ++k) {
                if (assoc.rho(mp, k) > 0.5) acc += power(m, k);
            }
        }
        inter[m] = acc;
    }

    for (int m = 0; m < m_count; ++m) {
        const auto& group = order.order[m];
        // suffix sums over the decoding order give the intra-UAV interference
        double tail = 0.0;
        for (auto it = group.rbegin(); it != group.rend(); ++it) {
            const int k = *it;
            sinr(m, k) = power(m, k) / (tail + inter[m] + rp.sigma2);
            tail += power(m, k);
        }
    }
    return sinr;
}

Eigen::MatrixXd compute_sinr(const Eigen::MatrixXcd& equivalent, const AssociationMatrix& assoc,
                             const DecodingOrder& order, const RadioParams& rp) {
    return compute_sinr_from_power(rp.p_g * equivalent.cwiseAbs2(), assoc, order, rp);
}

RateReport rates_and_feasibility(const Eigen::MatrixXd& sinr, const AssociationMatrix& assoc,
                                 const RadioParams& rp) {
    const int m_count = static_cast<int>(sinr.rows());
    const int k_count = static_cast<int>(sinr.cols());
    RateReport report;
    report.rates = Eigen::MatrixXd::Zero(m_count, k_count);
    report.feasible.setZero(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        for (int k = 0; k < k_count; ++k) {
            if (assoc.rho(m, k) <= 0.5) continue;
            report.rates(m, k) = std::log1p(sinr(m, k));
            report.feasible(m, k) = sinr(m, k) >= rp.gamma ? 1 : 0;
        }
    }
    return report;
}

double sum_rate(const Eigen::MatrixXd& sinr, const AssociationMatrix& assoc) {
    double total = 0.0;
    for (int m = 0; m < sinr.rows(); ++m) {
        for (int k = 0; k < sinr.cols(); ++k) {
            if (assoc.rho(m, k) > 0.5) total += std::log1p(sinr(m, k));
        }
    }
    return total;
}

OmaReport oma_baseline_rates(const Eigen::MatrixXcd& equivalent, const AssociationMatrix& assoc,
                             const RadioParams& rp, AccessScheme scheme) {
    if (!assoc.binary) throw std::invalid_argument("oma_baseline_rates: association must be binary");
    const int m_count = assoc.num_uavs();
    const int k_count = assoc.num_gus();
    const Eigen::MatrixXd power = rp.p_g * equivalent.cwiseAbs2();

    Eigen::VectorXd inter = Eigen::VectorXd::Zero(m_count);
    for (int m = 0; m < m_count; ++m) {
        for (int mp = 0; mp < m_count; ++mp) {
            if (mp == m) continue;
            for (int k = 0; k < k_count; ++k) {
                if (assoc.rho(mp, k) > 0.5) inter[m] += power(m, k);
            }
        }
    }

    OmaReport report;
    report.rates = Eigen::MatrixXd::Zero(m_count, k_count);
    report.sinr = Eigen::MatrixXd::Zero(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        const int d_m = assoc.group_size(m);
        if (d_m == 0) continue;
        const double share = 1.0 / static_cast<double>(d_m);
        for (int k = 0; k < k_count; ++k) {
            if (assoc.rho(m, k) <= 0.5) continue;
            double s = 0.0;
            switch (scheme) {
                case AccessScheme::Tdma:
                    // full band for 1/D_m of the slot
                    s = power(m, k) / (inter[m] + rp.sigma2);
                    break;
                case AccessScheme::Fdma:
                    // 1/D_m of the band, full power; noise and inter-UAV
                    // interference scale with the same fraction
                    s = power(m, k) / (share * (inter[m] + rp.sigma2));
                    break;
            }
            report.sinr(m, k) = s;
            report.rates(m, k) = share * std::log1p(s);
        }
    }
    return report;
}

} // namespace arisim
