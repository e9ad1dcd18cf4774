#include "arisim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace arisim {

Mlp::Mlp(const std::vector<int>& sizes, Activation output_act, Rng& rng) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    const int layers = static_cast<int>(sizes.size()) - 1;
    for (int i = 0; i < layers; ++i) {
        const int in = sizes[i], out = sizes[i + 1];
        const bool last = i == layers - 1;
        // Xavier for hidden layers, small uniform for the output layer so the
        // initial policy sits near the center of the action box
        const double lim = last ? 1e-3 : std::sqrt(6.0 / (in + out));
        Eigen::MatrixXd w(out, in);
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-lim, lim);
        }
        weights.push_back(std::move(w));
        biases.push_back(Eigen::VectorXd::Zero(out));
        acts.push_back(last ? output_act : Activation::Tanh);
    }
}

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation a) {
    if (a == Activation::Tanh) z = z.array().tanh();
}

} // namespace

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    return forward(Eigen::MatrixXd(x.transpose())).row(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
    if (x.cols() != input_dim()) throw std::invalid_argument("Mlp::forward: input width mismatch");
    if (cache != nullptr) {
        cache->acts.clear();
        cache->acts.push_back(x);
    }
    Eigen::MatrixXd a = x;
    for (int i = 0; i < layer_count(); ++i) {
        Eigen::MatrixXd z = a * weights[i].transpose();
        z.rowwise() += biases[i].transpose();
        apply_activation(z, acts[i]);
        a = std::move(z);
        if (cache != nullptr) cache->acts.push_back(a);
    }
    return a;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& out_cotangent,
                              Gradients* grads) const {
    if (static_cast<int>(cache.acts.size()) != layer_count() + 1) {
        throw std::invalid_argument("Mlp::backward: cache does not match network");
    }
    if (grads != nullptr) {
        grads->w.assign(layer_count(), Eigen::MatrixXd());
        grads->b.assign(layer_count(), Eigen::VectorXd());
    }
    Eigen::MatrixXd g = out_cotangent;
    for (int i = layer_count() - 1; i >= 0; --i) {
        if (acts[i] == Activation::Tanh) {
            g = g.array() * (1.0 - cache.acts[i + 1].array().square());
        }
        if (grads != nullptr) {
            grads->w[i] = g.transpose() * cache.acts[i];
            grads->b[i] = g.colwise().sum();
        }
        g = g * weights[i];
    }
    return g;
}

int Mlp::parameter_count() const {
    int n = 0;
    for (int i = 0; i < layer_count(); ++i) {
        n += static_cast<int>(weights[i].size() + biases[i].size());
    }
    return n;
}

Eigen::VectorXd Mlp::parameters() const {
    Eigen::VectorXd flat(parameter_count());
    Eigen::Index at = 0;
    for (int i = 0; i < layer_count(); ++i) {
        flat.segment(at, weights[i].size()) =
            Eigen::Map<const Eigen::VectorXd>(weights[i].data(), weights[i].size());
        at += weights[i].size();
        flat.segment(at, biases[i].size()) = biases[i];
        at += biases[i].size();
    }
    return flat;
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != parameter_count()) {
        throw std::invalid_argument("Mlp::set_parameters: size mismatch");
    }
    Eigen::Index at = 0;
    for (int i = 0; i < layer_count(); ++i) {
        Eigen::Map<Eigen::VectorXd>(weights[i].data(), weights[i].size()) =
            flat.segment(at, weights[i].size());
        at += weights[i].size();
        biases[i] = flat.segment(at, biases[i].size());
        at += biases[i].size();
    }
}

Eigen::VectorXd Mlp::Gradients::flatten() const {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < w.size(); ++i) n += w[i].size() + b[i].size();
    Eigen::VectorXd flat(n);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        flat.segment(at, w[i].size()) = Eigen::Map<const Eigen::VectorXd>(w[i].data(), w[i].size());
        at += w[i].size();
        flat.segment(at, b[i].size()) = b[i];
        at += b[i].size();
    }
    return flat;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (m.size() != params.size()) {
        m = Eigen::VectorXd::Zero(params.size());
        v = Eigen::VectorXd::Zero(params.size());
        t = 0;
    }
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params -= (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
}

} // namespace arisim
