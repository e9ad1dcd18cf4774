#include "arisim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace arisim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Complex = std::complex<double>;

Eigen::MatrixXd received_power(const ReflectionModel& model, const Eigen::VectorXcd& theta,
                               const RadioParams& rp) {
    return rp.p_g * model.equivalent_gains(theta).cwiseAbs2();
}

// Sum over UAVs of log((own + inter + sigma2)/(inter + sigma2)); equals the
// sum of log(1+SINR) over the SIC chain for binary rho and stays the lifted
// objective for relaxed rho.
double power_sum_rate(const Eigen::MatrixXd& power, const Eigen::MatrixXd& rho,
                      const std::vector<std::uint8_t>& active, double sigma2) {
    const int m_count = static_cast<int>(power.rows());
    const int k_count = static_cast<int>(power.cols());
    Eigen::VectorXd col_weight(k_count);
    for (int k = 0; k < k_count; ++k) col_weight[k] = rho.col(k).sum();
    double total = 0.0;
    for (int m = 0; m < m_count; ++m) {
        if (!active[m]) continue;
        double all = 0.0, own = 0.0;
        for (int k = 0; k < k_count; ++k) {
            all += col_weight[k] * power(m, k);
            own += rho(m, k) * power(m, k);
        }
        if (own <= 0.0) continue;
        total += std::log(all + sigma2) - std::log(all - own + sigma2);
    }
    return total;
}

double binariness_violation(const Eigen::MatrixXd& rho) {
    return (rho.array() - rho.array().square()).sum();
}

// ---------------------------------------------------------------- phases --

struct PhaseObjective {
    // receivers with a nonempty group and the GUs served by anyone
    std::vector<int> receivers;
    std::vector<int> served;
    // current equivalent channels for (receiver, served GU) pairs
    Eigen::MatrixXcd equiv;  // indexed [ri][si]
    const ReflectionModel* model = nullptr;
    const AssociationMatrix* assoc = nullptr;
    double p_g = 0.0, sigma2 = 0.0;

    void init(const ReflectionModel& m, const AssociationMatrix& a, const RadioParams& rp,
              const Eigen::VectorXcd& theta) {
        model = &m;
        assoc = &a;
        p_g = rp.p_g;
        sigma2 = rp.sigma2;
        receivers.clear();
        served.clear();
        for (int mm = 0; mm < m.num_uavs(); ++mm) {
            if (m.active[mm] && a.group_size(mm) > 0) receivers.push_back(mm);
        }
        for (int k = 0; k < m.num_gus(); ++k) {
            if (a.serving_uav(k) >= 0) served.push_back(k);
        }
        equiv.resize(receivers.size(), served.size());
        for (std::size_t ri = 0; ri < receivers.size(); ++ri) {
            for (std::size_t si = 0; si < served.size(); ++si) {
                equiv(ri, si) = m.equivalent_gain(theta, receivers[ri], served[si]);
            }
        }
    }

    double value() const {
        double total = 0.0;
        for (std::size_t ri = 0; ri < receivers.size(); ++ri) {
            const int m = receivers[ri];
            double all = sigma2, inter = sigma2;
            for (std::size_t si = 0; si < served.size(); ++si) {
                const double g = p_g * std::norm(equiv(ri, si));
                all += g;
                if (assoc->rho(m, served[si]) <= 0.5) inter += g;
            }
            total += std::log(all) - std::log(inter);
        }
        return total;
    }
};

// Exact single-element update: with every |h|^2 affine in (cos phi, sin phi),
// scan the circle and polish the best bracket by golden section.
double best_element_phase(const PhaseObjective& obj, const Eigen::MatrixXcd& rest,
                          const Eigen::MatrixXcd& coeff, const OptimizeConfig& cfg) {
    const std::size_t n_rx = obj.receivers.size();
    const std::size_t n_sv = obj.served.size();
    // per receiver: A(phi) = a0 + aC cos + aS sin (all served), B same (inter only)
    Eigen::VectorXd a0(n_rx), ac(n_rx), as(n_rx), b0(n_rx), bc(n_rx), bs(n_rx);
    a0.setConstant(obj.sigma2);
    b0.setConstant(obj.sigma2);
    ac.setZero(); as.setZero(); bc.setZero(); bs.setZero();
    for (std::size_t ri = 0; ri < n_rx; ++ri) {
        const int m = obj.receivers[ri];
        for (std::size_t si = 0; si < n_sv; ++si) {
            const Complex r = rest(ri, si);
            const Complex c = coeff(ri, si);
            const Complex z = 2.0 * std::conj(r) * c;
            const double w = obj.p_g * (std::norm(r) + std::norm(c));
            const double uc = obj.p_g * z.real();
            const double us = -obj.p_g * z.imag();
            a0[ri] += w; ac[ri] += uc; as[ri] += us;
            if (obj.assoc->rho(m, obj.served[si]) <= 0.5) {
                b0[ri] += w; bc[ri] += uc; bs[ri] += us;
            }
        }
    }
    auto eval = [&](double phi) {
        const double cph = std::cos(phi), sph = std::sin(phi);
        double total = 0.0;
        for (std::size_t ri = 0; ri < n_rx; ++ri) {
            const double a = a0[ri] + ac[ri] * cph + as[ri] * sph;
            const double b = b0[ri] + bc[ri] * cph + bs[ri] * sph;
            total += std::log(std::max(a, 1e-300)) - std::log(std::max(b, 1e-300));
        }
        return total;
    };

    const int scan = std::max(cfg.phase_scan_points, 8);
    double best_phi = 0.0, best_val = eval(0.0);
    for (int i = 1; i < scan; ++i) {
        const double phi = kTwoPi * i / scan;
        const double v = eval(phi);
        if (v > best_val) { best_val = v; best_phi = phi; }
    }
    // golden-section polish around the winning bracket
    const double step = kTwoPi / scan;
    double lo = best_phi - step, hi = best_phi + step;
    const double inv_gold = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_gold * (hi - lo), x2 = lo + inv_gold * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 64; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + inv_gold * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - inv_gold * (hi - lo);
            f1 = eval(x1);
        }
    }
    const double mid = 0.5 * (lo + hi);
    return eval(mid) >= best_val ? mid : best_phi;
}

PhaseShiftVector phases_heuristic(const ReflectionModel& model, const AssociationMatrix& assoc,
                                  const RadioParams& rp) {
    const int dim = model.dim();
    PhaseShiftVector theta = PhaseShiftVector::all_ones(dim);
    // strongest associated link by received optimistic power, lowest (m,k) on ties
    int best_m = -1, best_k = -1;
    double best = -1.0;
    for (int m = 0; m < model.num_uavs(); ++m) {
        if (!model.active[m]) continue;
        for (int k = 0; k < model.num_gus(); ++k) {
            if (assoc.rho(m, k) <= 0.5) continue;
            const double n = model.optimistic_norm(m, k);
            const double val = rp.p_g * n * n;
            if (val > best) { best = val; best_m = m; best_k = k; }
        }
    }
    if (best_m < 0 || dim == 0) return theta;
    const Eigen::VectorXcd& c = model.cascade[best_m][best_k];
    if (c.size() == 0) return theta;
    const double target = std::arg(model.direct(best_m, best_k));
    for (int l = 0; l < dim; ++l) {
        if (std::abs(c[l]) == 0.0) continue;
        const double phi = target - std::arg(c[l]);
        theta.theta[l] = Complex(std::cos(phi), std::sin(phi));
    }
    return theta;
}

PhaseShiftVector phases_coord_descent(const ReflectionModel& model, const AssociationMatrix& assoc,
                                      const RadioParams& rp, const OptimizeConfig& cfg) {
    const int dim = model.dim();
    // the heuristic alignment is a strong warm start
    PhaseShiftVector theta = phases_heuristic(model, assoc, rp);
    if (dim == 0) return theta;

    PhaseObjective obj;
    obj.init(model, assoc, rp, theta.theta);
    if (obj.receivers.empty()) return theta;

    const std::size_t n_rx = obj.receivers.size();
    const std::size_t n_sv = obj.served.size();
    Eigen::MatrixXcd coeff(n_rx, n_sv), rest(n_rx, n_sv);

    double prev = obj.value();
    for (int sweep = 0; sweep < cfg.phase_max_sweeps; ++sweep) {
        for (int l = 0; l < dim; ++l) {
            bool any = false;
            for (std::size_t ri = 0; ri < n_rx; ++ri) {
                for (std::size_t si = 0; si < n_sv; ++si) {
                    const auto& casc = model.cascade[obj.receivers[ri]][obj.served[si]];
                    const Complex c = casc.size() > 0 ? casc[l] : Complex(0.0);
                    coeff(ri, si) = c;
                    rest(ri, si) = obj.equiv(ri, si) - c * theta.theta[l];
                    if (c != Complex(0.0)) any = true;
                }
            }
            if (!any) continue;
            const double phi = best_element_phase(obj, rest, coeff, cfg);
            const Complex t(std::cos(phi), std::sin(phi));
            theta.theta[l] = t;
            obj.equiv = rest + coeff * t;
        }
        const double cur = obj.value();
        if (cur - prev < cfg.phase_sweep_tol) break;
        prev = cur;
    }
    return theta;
}

PhaseShiftVector phases_oracle(const ReflectionModel& model, const AssociationMatrix& assoc,
                               const RadioParams& rp, const OptimizeConfig& cfg) {
    const int dim = model.dim();
    if (dim > cfg.phase_oracle_max_dim) {
        throw std::invalid_argument("solve_phases: oracle limited to " +
                                    std::to_string(cfg.phase_oracle_max_dim) + " elements");
    }
    PhaseShiftVector theta = PhaseShiftVector::all_ones(dim);
    if (dim == 0) return theta;

    const int levels = cfg.phase_oracle_levels;
    std::vector<Complex> ring(levels);
    for (int q = 0; q < levels; ++q) {
        const double phi = kTwoPi * q / levels;
        ring[q] = Complex(std::cos(phi), std::sin(phi));
    }
    std::vector<int> digits(dim, 0);
    Eigen::VectorXcd candidate(dim);
    Eigen::VectorXcd best = Eigen::VectorXcd::Ones(dim);
    double best_val = -std::numeric_limits<double>::infinity();
    while (true) {
        for (int l = 0; l < dim; ++l) candidate[l] = ring[digits[l]];
        const double val = power_sum_rate(received_power(model, candidate, rp), assoc.rho,
                                          model.active, rp.sigma2);
        if (val > best_val) { best_val = val; best = candidate; }
        int pos = 0;
        while (pos < dim && ++digits[pos] == levels) digits[pos++] = 0;
        if (pos == dim) break;
    }
    theta.theta = best;
    return theta;
}

// ----------------------------------------------------------- association --

struct ScaWork {
    const Eigen::MatrixXd* power = nullptr;
    std::vector<std::uint8_t> active;
    double sigma2 = 0.0;
    Eigen::VectorXd ell0;      // anchors of the subtracted log, per UAV
    Eigen::MatrixXd rho0;      // penalty anchor
    double kappa = 1.0;

    double inter_at(const Eigen::MatrixXd& rho, int m) const {
        double acc = 0.0;
        for (int mp = 0; mp < rho.rows(); ++mp) {
            if (mp == m) continue;
            for (int k = 0; k < rho.cols(); ++k) acc += rho(mp, k) * (*power)(m, k);
        }
        return acc;
    }

    // linearized concave surrogate: log(total) - inter/(ell0+s2) - kappa*pen
    double value(const Eigen::MatrixXd& rho) const {
        double total = 0.0;
        for (int m = 0; m < rho.rows(); ++m) {
            if (!active[m]) continue;
            double all = sigma2;
            for (int mp = 0; mp < rho.rows(); ++mp) {
                for (int k = 0; k < rho.cols(); ++k) all += rho(mp, k) * (*power)(m, k);
            }
            total += std::log(all) - inter_at(rho, m) / (ell0[m] + sigma2);
        }
        double pen = 0.0;
        for (int m = 0; m < rho.rows(); ++m) {
            for (int k = 0; k < rho.cols(); ++k) {
                pen += rho(m, k) * (1.0 - 2.0 * rho0(m, k)) + rho0(m, k) * rho0(m, k);
            }
        }
        return total - kappa * pen;
    }

    Eigen::MatrixXd gradient(const Eigen::MatrixXd& rho) const {
        const int m_count = static_cast<int>(rho.rows());
        const int k_count = static_cast<int>(rho.cols());
        Eigen::VectorXd all(m_count);
        for (int m = 0; m < m_count; ++m) {
            double acc = sigma2;
            for (int mp = 0; mp < m_count; ++mp) {
                for (int k = 0; k < k_count; ++k) acc += rho(mp, k) * (*power)(m, k);
            }
            all[m] = acc;
        }
        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m_count, k_count);
        for (int mp = 0; mp < m_count; ++mp) {
            if (!active[mp]) continue;
            for (int k = 0; k < k_count; ++k) {
                double g = 0.0;
                for (int m = 0; m < m_count; ++m) {
                    if (!active[m]) continue;
                    g += (*power)(m, k) / all[m];
                    if (m != mp) g -= (*power)(m, k) / (ell0[m] + sigma2);
                }
                g -= kappa * (1.0 - 2.0 * rho0(mp, k));
                grad(mp, k) = g;
            }
        }
        return grad;
    }
};

// Conditional gradient over the product of per-GU simplices; the linear
// oracle picks the best UAV per GU (or nobody when no gradient is positive).
void frank_wolfe(ScaWork& work, Eigen::MatrixXd& rho, const OptimizeConfig& cfg) {
    const int m_count = static_cast<int>(rho.rows());
    const int k_count = static_cast<int>(rho.cols());
    for (int it = 0; it < cfg.fw_max_iters; ++it) {
        const Eigen::MatrixXd grad = work.gradient(rho);
        Eigen::MatrixXd vertex = Eigen::MatrixXd::Zero(m_count, k_count);
        for (int k = 0; k < k_count; ++k) {
            int best_m = -1;
            double best_g = 0.0;
            for (int m = 0; m < m_count; ++m) {
                if (!work.active[m]) continue;
                if (grad(m, k) > best_g) { best_g = grad(m, k); best_m = m; }
            }
            if (best_m >= 0) vertex(best_m, k) = 1.0;
        }
        const Eigen::MatrixXd dir = vertex - rho;
        const double gap = (grad.array() * dir.array()).sum();
        if (gap <= cfg.fw_tol * std::max(1.0, std::abs(work.value(rho)))) break;
        // exact-enough line search on the concave restriction
        double lo = 0.0, hi = 1.0;
        for (int ls = 0; ls < 64; ++ls) {
            const double x1 = lo + (hi - lo) / 3.0;
            const double x2 = hi - (hi - lo) / 3.0;
            if (work.value(rho + x1 * dir) < work.value(rho + x2 * dir)) lo = x1;
            else hi = x2;
        }
        const double gamma = 0.5 * (lo + hi);
        if (gamma <= 0.0) break;
        rho += gamma * dir;
    }
}

AssociationMatrix round_and_repair(const Eigen::MatrixXd& relaxed,
                                   const Eigen::MatrixXd& power,
                                   const Eigen::MatrixXd& surrogate_norm,
                                   const std::vector<std::uint8_t>& active,
                                   const RadioParams& rp) {
    const int m_count = static_cast<int>(relaxed.rows());
    const int k_count = static_cast<int>(relaxed.cols());
    AssociationMatrix assoc = AssociationMatrix::zeros(m_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        int best_m = -1;
        double best = 0.5;  // rounding threshold
        for (int m = 0; m < m_count; ++m) {
            if (!active[m]) continue;
            if (relaxed(m, k) >= best && (best_m < 0 || relaxed(m, k) > best)) {
                best = relaxed(m, k);
                best_m = m;
            }
        }
        if (best_m >= 0) assoc.rho(best_m, k) = 1.0;
    }
    // drop the lowest-rate violating GU until the SIC threshold holds
    while (true) {
        const DecodingOrder order = decode_order(surrogate_norm, assoc);
        const Eigen::MatrixXd sinr = compute_sinr_from_power(power, assoc, order, rp);
        int worst_m = -1, worst_k = -1;
        double worst = std::numeric_limits<double>::infinity();
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (assoc.rho(m, k) <= 0.5) continue;
                if (sinr(m, k) < rp.gamma && sinr(m, k) < worst) {
                    worst = sinr(m, k);
                    worst_m = m;
                    worst_k = k;
                }
            }
        }
        if (worst_m < 0) break;
        assoc.rho(worst_m, worst_k) = 0.0;
    }
    return assoc;
}

AssociationMatrix association_sca(const Eigen::MatrixXd& power,
                                  const Eigen::MatrixXd& surrogate_norm,
                                  const std::vector<std::uint8_t>& active,
                                  const RadioParams& rp, const OptimizeConfig& cfg) {
    const int m_count = static_cast<int>(power.rows());
    const int k_count = static_cast<int>(power.cols());
    int n_active = 0;
    for (auto a : active) n_active += a ? 1 : 0;
    // nothing to assign: no receivers, or every candidate GU masked out
    if (n_active == 0 || power.maxCoeff() <= 0.0) {
        return AssociationMatrix::zeros(m_count, k_count);
    }

    // one full penalty schedule from a given linearization start
    auto solve_from = [&](Eigen::MatrixXd rho) {
        ScaWork work;
        work.power = &power;
        work.active = active;
        work.sigma2 = rp.sigma2;
        work.kappa = cfg.kappa_init;
        work.ell0.resize(m_count);
        auto penalized = [&](const Eigen::MatrixXd& r) {
            return power_sum_rate(power, r, active, rp.sigma2) -
                   work.kappa * binariness_violation(r);
        };
        for (int round = 0; round < cfg.penalty_max_rounds; ++round) {
            // re-anchor and solve until the surrogate stops paying at this
            // kappa; the interference tangent is steep near zero and a single
            // anchor update locks in whatever the first pass found
            double incumbent = penalized(rho);
            for (int inner = 0; inner < cfg.sca_inner_rounds; ++inner) {
                work.rho0 = rho;
                for (int m = 0; m < m_count; ++m) work.ell0[m] = work.inter_at(rho, m);
                frank_wolfe(work, rho, cfg);
                const double value = penalized(rho);
                if (value - incumbent < 1e-9 * std::max(1.0, std::abs(incumbent))) break;
                incumbent = value;
            }
            const double viol = binariness_violation(rho);
            if (cfg.trace != nullptr) {
                (*cfg.trace) << "{\"solver\":\"assoc_sca\",\"round\":" << round
                             << ",\"kappa\":" << work.kappa << ",\"violation\":" << viol
                             << "}\n";
            }
            if (viol < cfg.penalty_tol) break;
            work.kappa = std::min(work.kappa * cfg.kappa_growth, cfg.kappa_max);
        }
        return round_and_repair(rho, power, surrogate_norm, active, rp);
    };

    // Structured starts: the relaxed objective barely separates rows before
    // the anchors settle, so local ascent from one interior point misses the
    // strong single-group and channel-split optima. Seed all of them and keep
    // the best executed association.
    std::vector<Eigen::MatrixXd> starts;
    Eigen::MatrixXd uniform = Eigen::MatrixXd::Zero(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        if (active[m]) uniform.row(m).setConstant(1.0 / static_cast<double>(n_active + 1));
    }
    starts.push_back(uniform);
    for (int u = 0; u < m_count; ++u) {
        if (!active[u]) continue;
        Eigen::MatrixXd one_group = Eigen::MatrixXd::Zero(m_count, k_count);
        one_group.row(u).setConstant(0.9);
        starts.push_back(one_group);
    }
    Eigen::MatrixXd greedy = Eigen::MatrixXd::Zero(m_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        int best_m = -1;
        double best_g = 0.0;
        for (int m = 0; m < m_count; ++m) {
            if (active[m] && power(m, k) > best_g) {
                best_g = power(m, k);
                best_m = m;
            }
        }
        if (best_m >= 0) greedy(best_m, k) = 0.9;
    }
    starts.push_back(greedy);

    AssociationMatrix best = AssociationMatrix::zeros(m_count, k_count);
    double best_val = -1.0;
    for (const Eigen::MatrixXd& start : starts) {
        const AssociationMatrix candidate = solve_from(start);
        const double val = power_sum_rate(power, candidate.rho, active, rp.sigma2);
        if (val > best_val) {
            best_val = val;
            best = candidate;
        }
    }
    return best;
}

AssociationMatrix association_oracle(const Eigen::MatrixXd& power,
                                     const Eigen::MatrixXd& surrogate_norm,
                                     const std::vector<std::uint8_t>& active,
                                     const RadioParams& rp, const OptimizeConfig& cfg,
                                     const Eigen::VectorXd& backlogs) {
    const int m_count = static_cast<int>(power.rows());
    const int k_count = static_cast<int>(power.cols());
    std::vector<int> act;
    for (int m = 0; m < m_count; ++m) {
        if (active[m]) act.push_back(m);
    }
    if (k_count > cfg.assoc_oracle_max_gus ||
        static_cast<int>(act.size()) > cfg.assoc_oracle_max_uavs) {
        throw std::invalid_argument("solve_association: oracle limited to small instances");
    }
    const bool clamped = backlogs.size() == k_count;

    AssociationMatrix best = AssociationMatrix::zeros(m_count, k_count);
    double best_val = 0.0;  // the empty assignment is always feasible
    std::vector<int> digits(k_count, 0);
    const int base = static_cast<int>(act.size()) + 1;
    while (true) {
        AssociationMatrix assoc = AssociationMatrix::zeros(m_count, k_count);
        for (int k = 0; k < k_count; ++k) {
            if (digits[k] > 0) assoc.rho(act[digits[k] - 1], k) = 1.0;
        }
        const DecodingOrder order = decode_order(surrogate_norm, assoc);
        const Eigen::MatrixXd sinr = compute_sinr_from_power(power, assoc, order, rp);
        bool feasible = true;
        double val = 0.0;
        for (int m = 0; m < m_count && feasible; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (assoc.rho(m, k) <= 0.5) continue;
                if (sinr(m, k) < rp.gamma) { feasible = false; break; }
                const double r = std::log1p(sinr(m, k));
                val += clamped ? std::min(r, backlogs[k]) : r;
            }
        }
        if (feasible && val > best_val) {
            best_val = val;
            best = assoc;
        }
        int pos = 0;
        while (pos < k_count && ++digits[pos] == base) digits[pos++] = 0;
        if (pos == k_count) break;
    }
    return best;
}

} // namespace

// ------------------------------------------------------------------ lifted --

Eigen::MatrixXcd LiftedProblem::lift(const Eigen::VectorXcd& theta) {
    const Eigen::Index n = theta.size();
    Eigen::VectorXcd v(n + 1);
    v.head(n) = theta;
    v[n] = Complex(1.0, 0.0);
    return v * v.adjoint();
}

double LiftedProblem::trace_term(int m, int k, const Eigen::MatrixXcd& phi) const {
    return (q[m][k].cwiseProduct(phi.transpose())).sum().real();
}

Eigen::MatrixXd LiftedProblem::powers(const Eigen::MatrixXcd& phi) const {
    Eigen::MatrixXd out(num_uavs(), num_gus());
    for (int m = 0; m < num_uavs(); ++m) {
        for (int k = 0; k < num_gus(); ++k) out(m, k) = radio.p_g * trace_term(m, k, phi);
    }
    return out;
}

double LiftedProblem::rate(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho, int m) const {
    double own = 0.0, all = 0.0;
    for (int mp = 0; mp < num_uavs(); ++mp) {
        for (int k = 0; k < num_gus(); ++k) {
            const double t = rho(mp, k) * radio.p_g * trace_term(m, k, phi);
            all += t;
            if (mp == m) own += t;
        }
    }
    return std::log(all + radio.sigma2) - std::log(all - own + radio.sigma2);
}

double LiftedProblem::sum_rate(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho) const {
    double total = 0.0;
    for (int m = 0; m < num_uavs(); ++m) {
        if (active[m]) total += rate(phi, rho, m);
    }
    return total;
}

double LiftedProblem::rate_linearized(const Eigen::MatrixXcd& phi, const Eigen::MatrixXd& rho,
                                      int m, double ell0) const {
    double own = 0.0, all = 0.0;
    for (int mp = 0; mp < num_uavs(); ++mp) {
        for (int k = 0; k < num_gus(); ++k) {
            const double t = rho(mp, k) * radio.p_g * trace_term(m, k, phi);
            all += t;
            if (mp == m) own += t;
        }
    }
    const double inter = all - own;
    return std::log(all + radio.sigma2) -
           (std::log(ell0 + radio.sigma2) + (inter - ell0) / (ell0 + radio.sigma2));
}

std::vector<double> LiftedProblem::sinr_residuals(const Eigen::MatrixXcd& phi,
                                                  const AssociationMatrix& assoc,
                                                  const DecodingOrder& order) const {
    std::vector<double> residuals;
    for (int m = 0; m < num_uavs(); ++m) {
        double inter = 0.0;
        for (int mp = 0; mp < num_uavs(); ++mp) {
            if (mp == m) continue;
            for (int k = 0; k < num_gus(); ++k) {
                if (assoc.rho(mp, k) > 0.5) inter += radio.p_g * trace_term(m, k, phi);
            }
        }
        for (int k : order.order[m]) {
            double intra = 0.0;
            for (int d : order.order[m]) {
                if (order.rank_of(m, d) > order.rank_of(m, k)) {
                    intra += radio.p_g * trace_term(m, d, phi);
                }
            }
            const double lhs = radio.p_g * trace_term(m, k, phi);
            residuals.push_back(lhs - radio.gamma * (intra + inter + radio.sigma2));
        }
    }
    return residuals;
}

LiftedProblem build_lifted(const ReflectionModel& model, const RadioParams& rp) {
    LiftedProblem lp;
    lp.radio = rp;
    lp.active = model.active;
    lp.dim = model.dim();
    lp.q.assign(model.num_uavs(), std::vector<Eigen::MatrixXcd>(model.num_gus()));
    for (int m = 0; m < model.num_uavs(); ++m) {
        for (int k = 0; k < model.num_gus(); ++k) {
            Eigen::VectorXcd row(lp.dim + 1);
            if (model.cascade[m][k].size() > 0) row.head(lp.dim) = model.cascade[m][k];
            else row.head(lp.dim).setZero();
            row[lp.dim] = model.direct(m, k);
            // rank-one Q with [theta;1]^H Q [theta;1] = |cascade.theta + direct|^2
            lp.q[m][k] = row.conjugate() * row.transpose();
        }
    }
    return lp;
}

bool valid_phase_matrix(const Eigen::MatrixXcd& phi, double tol) {
    if (phi.rows() != phi.cols()) return false;
    if ((phi - phi.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        if (std::abs(phi(i, i) - Complex(1.0, 0.0)) > tol) return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

// ------------------------------------------------------------------ public --

PhaseShiftVector solve_phases(const ReflectionModel& model, const AssociationMatrix& assoc,
                              const RadioParams& rp, PhaseStrategy strategy,
                              const OptimizeConfig& cfg) {
    if (!assoc.binary) throw std::invalid_argument("solve_phases: association must be binary");
    switch (strategy) {
        case PhaseStrategy::Heuristic: return phases_heuristic(model, assoc, rp);
        case PhaseStrategy::CoordDescent: return phases_coord_descent(model, assoc, rp, cfg);
        case PhaseStrategy::Oracle: return phases_oracle(model, assoc, rp, cfg);
    }
    throw std::logic_error("solve_phases: unknown strategy");
}

AssociationMatrix solve_association_on_power(const Eigen::MatrixXd& power,
                                             const Eigen::MatrixXd& surrogate_norm,
                                             const std::vector<std::uint8_t>& active,
                                             const RadioParams& rp, AssocStrategy strategy,
                                             const OptimizeConfig& cfg,
                                             const Eigen::VectorXd& backlogs) {
    switch (strategy) {
        case AssocStrategy::Sca:
            // the relaxed surrogate carries no queue terms; backlogs enter
            // reporting and the oracle objective only
            return association_sca(power, surrogate_norm, active, rp, cfg);
        case AssocStrategy::Oracle:
            return association_oracle(power, surrogate_norm, active, rp, cfg, backlogs);
    }
    throw std::logic_error("solve_association: unknown strategy");
}

namespace {

// GUs with an empty buffer have nothing to transmit; when backlogs are
// known, remove them from the candidate set entirely
void mask_empty_gus(Eigen::MatrixXd& power, Eigen::MatrixXd& surrogate,
                    const Eigen::VectorXd& backlogs) {
    if (backlogs.size() != power.cols()) return;
    for (Eigen::Index k = 0; k < power.cols(); ++k) {
        if (backlogs[k] <= 0.0) {
            power.col(k).setZero();
            surrogate.col(k).setZero();
        }
    }
}

} // namespace

AssociationMatrix solve_association(const ReflectionModel& model, const PhaseShiftVector& theta,
                                    const RadioParams& rp, const Eigen::VectorXd& backlogs,
                                    AssocStrategy strategy, const OptimizeConfig& cfg) {
    Eigen::MatrixXd power = received_power(model, theta.theta, rp);
    Eigen::MatrixXd surrogate = model.optimistic_norms();
    mask_empty_gus(power, surrogate, backlogs);
    return solve_association_on_power(power, surrogate, model.active, rp, strategy, cfg,
                                      backlogs);
}

AoResult alternate_optimize(const ReflectionModel& model, const RadioParams& rp,
                            const Eigen::VectorXd& backlogs, const OptimizeConfig& cfg) {
    const Eigen::MatrixXd surrogate = model.optimistic_norms();
    const int m_count = model.num_uavs();
    const int k_count = model.num_gus();

    auto evaluate = [&](const PhaseShiftVector& theta, const AssociationMatrix& assoc) {
        const Eigen::MatrixXd power = received_power(model, theta.theta, rp);
        const DecodingOrder order = decode_order(surrogate, assoc);
        const Eigen::MatrixXd sinr = compute_sinr_from_power(power, assoc, order, rp);
        double obj = 0.0, clamped = 0.0;
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < k_count; ++k) {
                if (assoc.rho(m, k) <= 0.5) continue;
                const double r = std::log1p(sinr(m, k));
                obj += r;
                clamped += backlogs.size() == k_count ? std::min(r, backlogs[k]) : r;
            }
        }
        return std::pair<double, double>(obj, clamped);
    };

    // association under the optimistic aligned channels seeds both modes
    Eigen::MatrixXd optimistic_power = Eigen::MatrixXd::Zero(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        if (!model.active[m]) continue;
        for (int k = 0; k < k_count; ++k) {
            optimistic_power(m, k) = rp.p_g * surrogate(m, k) * surrogate(m, k);
        }
    }
    Eigen::MatrixXd masked_surrogate = surrogate;
    mask_empty_gus(optimistic_power, masked_surrogate, backlogs);
    AssociationMatrix assoc = solve_association_on_power(optimistic_power, masked_surrogate,
                                                         model.active, rp,
                                                         cfg.assoc_strategy, cfg, backlogs);

    AoResult result;
    if (cfg.two_step) {
        result.theta = solve_phases(model, assoc, rp, cfg.phase_strategy, cfg);
        result.assoc = assoc;
        std::tie(result.objective, result.objective_clamped) = evaluate(result.theta, assoc);
        result.iterations = 1;
        result.converged = true;
        result.objective_history.push_back(result.objective);
        return result;
    }

    // seed the incumbent with the two-step pair: heuristic phases for the
    // optimistic association, so the full loop can only improve on it
    result.theta = solve_phases(model, assoc, rp, PhaseStrategy::Heuristic, cfg);
    result.assoc = assoc;
    std::tie(result.objective, result.objective_clamped) = evaluate(result.theta, assoc);
    result.objective_history.push_back(result.objective);

    double prev_best = result.objective;
    for (int it = 1; it <= cfg.ao_max_iters; ++it) {
        const PhaseShiftVector theta = solve_phases(model, assoc, rp, cfg.phase_strategy, cfg);
        assoc = solve_association(model, theta, rp, backlogs, cfg.assoc_strategy, cfg);
        const auto [obj, clamped] = evaluate(theta, assoc);
        if (obj > result.objective) {
            result.theta = theta;
            result.assoc = assoc;
            result.objective = obj;
            result.objective_clamped = clamped;
        }
        result.iterations = it;
        result.objective_history.push_back(result.objective);
        if (cfg.trace != nullptr) {
            (*cfg.trace) << "{\"solver\":\"ao\",\"iter\":" << it
                         << ",\"objective\":" << result.objective << "}\n";
        }
        const double change = std::abs(result.objective - prev_best);
        if (change <= cfg.ao_tol * std::max(std::abs(prev_best), 1e-12)) {
            result.converged = true;
            break;
        }
        prev_best = result.objective;
    }
    return result;
}

} // namespace arisim
